# coding: utf-8

# # Poles of the normalizing factor
#
# r(s, psi) is a quotient of Rankin-Selberg L-factors attached to a target
# St(rho0, a0) and to every block of psi. A block contributes a simple pole at
# s0 = (b0-1)/2 exactly in the cells of a small table.

# In[1]:

from apacket.halfint import HalfInt
from apacket.lfactor import contribution_table, order_at, pair_normalizer_order, r_of_psi, target_params
from apacket.params import ORTH, CuspidalLabel, block_from_ab

rho = CuspidalLabel("rho", 1, ORTH)
a0, b0 = 4, 3
print(target_params(a0, b0))


# In[2]:

s0 = HalfInt.from_twice(b0 - 1)
for a, b in [(4, 3), (3, 4), (2, 5), (6, 1), (1, 2), (5, 3)]:
    blk = block_from_ab(rho, a, b)
    res = order_at(r_of_psi([blk], rho, a0), s0)
    print(blk.ab_str(), "table:", contribution_table(blk, a0, b0, rho), "order:", res)


# The whole table can be checked against the L-factor orders in a few lines.

# In[3]:

bad = 0
for a in range(1, 13):
    for b in range(1, 13):
        blk = block_from_ab(rho, a, b)
        want = -1 if contribution_table(blk, a0, b0, rho) else 0
        bad += order_at(r_of_psi([blk], rho, a0), s0).order != want
print("mismatches:", bad)


# # Two ladders
#
# The normalized operator between two ladders is holomorphic at 0 when
# B0' >= B or A0' >= A.

# In[4]:

print(pair_normalizer_order(2, 1, 3, 1))
print(pair_normalizer_order(1, 0, 3, 1))
