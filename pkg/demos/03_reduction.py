# coding: utf-8

# # Reducing a target to tempered cases
#
# A target is (psi, point, rho0, a0, s0). Each reduction step replaces psi by
# a smaller parameter and records the L-factor identities that carry the pole
# order across. Unknown t or eta entries are pinned as the steps need them.

# In[1]:

from apacket.packet import PacketPoint
from apacket.params import ORTH, CuspidalLabel, JordanBlock, PsiParameter
from apacket.halfint import HalfInt
from apacket.reduce import classify_case, measure, run_reduction, verify_certificate, Target

rho = CuspidalLabel("rho", 1, ORTH)
h = HalfInt
blocks = (JordanBlock(rho, h(3), h(0), 1), JordanBlock(rho, h(1), h(1), -1), JordanBlock(rho, h(2), h(2), -1))
t = Target(PsiParameter(blocks), PacketPoint((1, 0, 0), (1, -1, 1)), rho, 5, h(1))
print(t)
print("cases:", classify_case(t), "measure:", measure(t))


# In[2]:

cert = run_reduction(t)
for node in cert.nodes():
    for step in node.steps:
        print(step)
        for entry in step.ledger:
            print("   ", entry, "->", entry.actual(step.before.s0))


# Every edge lowers the measure, every ledger entry holds and every leaf is a
# base case.

# In[3]:

print("nodes:", len(cert.nodes()), "depth:", cert.depth(), "verified:", verify_certificate(cert))
