"""
Alice and Bob on separate sockets
=================================

Bob gets only the public support and his own input. Alice connects over
TCP, and every register she sends is a frame of float amplitudes with a
declared qubit count. The transcript matches the in-process run exactly.
"""

from qxor import (BobEndpoint, ProtocolConfig, Alice, make_rng, named_function, run_protocol,
                  wht)
from qxor.transport import connect_alice

f = named_function("equality_3")
g = f.as_real()
x, y, seed = 0b101, 0b101, 21
cfg = ProtocolConfig(seed=seed)

bob = BobEndpoint(wht(g).support, y, seed, f.n)
thread = bob.start()
print("Bob listening on", bob.address)

link = connect_alice(*bob.address, seed=seed)
answer, tr = Alice(f, g, x, cfg, make_rng(seed)).run(link)
link.sock.close()
thread.join()

print(f"networked answer {answer:+d}, truth {f(x ^ y):+d}")
print(f"ledger {link.ledger_qubits} qubits, transcript {tr.total_qubits}")

local_answer, local_tr = run_protocol(f, g, x, y, cfg, make_rng(seed))
print("same transcript as in-process:", local_tr.to_dict() == tr.to_dict())
