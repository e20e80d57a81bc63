# coding: utf-8

# # Packets of a parameter
#
# A parameter is a list of Jordan blocks (rho, a, b). Each block is stored as
# (rho, A, B, zeta) with A = (a+b)/2 - 1, B = |a-b|/2 and zeta the sign of a-b.

# In[1]:

from apacket.params import ORTH, CuspidalLabel, GroupType, PsiParameter, block_from_ab, canonical_order, ell
from apacket.packet import PacketPoint, center_product, enumerate_packet, restriction_discrete_step

rho = CuspidalLabel("rho", 1, ORTH)
blocks = [block_from_ab(rho, 1, 1), block_from_ab(rho, 3, 1), block_from_ab(rho, 5, 1)]
psi = PsiParameter(canonical_order(blocks), GroupType(hasse_sign=1))
print(psi)


# A tempered parameter with three blocks and a discrete diagonal restriction
# has 2^(3-1) = 4 members: the eta signs whose product matches the Hasse sign.

# In[2]:

for entry in enumerate_packet(psi):
    print(entry.point, entry.epsilons, entry.center)


# # Lowering a block
#
# With t > 0 a block (rho, a, b) loses 2 from inf(a, b) and records a segment.
# With t = 0 it splits into flat blocks whose eta alternate.

# In[3]:

psi = PsiParameter((block_from_ab(rho, 5, 3),))
point = PacketPoint((1,), (1,))
step = restriction_discrete_step(psi, point, 0)
print(step.psi_prime, step.point_prime, step.segment)
print("ell:", ell(psi), "->", ell(step.psi_prime))


# In[4]:

step = restriction_discrete_step(psi, PacketPoint((0,), (-1,)), 0)
print(step.psi_prime, step.point_prime)
print("center:", center_product(psi, PacketPoint((0,), (-1,))),
      center_product(step.psi_prime, step.point_prime))
