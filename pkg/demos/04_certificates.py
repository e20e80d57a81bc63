# coding: utf-8

# # Certificates on disk
#
# Certificates serialize to a line-oriented text format and to JSON. Reading
# one back checks the step digests; verification then recomputes every order.

# In[1]:

import dataclasses
import random

from apacket.certio import from_json, from_text, to_json, to_text
from apacket.reduce import certificate_problems, run_reduction, verify_certificate
from apacket.sampling import random_target

cert = run_reduction(random_target(random.Random(11)))
text = to_text(cert)
print(text[:600])


# In[2]:

print(verify_certificate(from_text(text)), verify_certificate(from_json(to_json(cert))))


# A tampered expectation is caught.

# In[3]:

node = cert.tree
step = node.steps[0]
entry = step.ledger[0]
node.steps[0] = dataclasses.replace(step, ledger=(dataclasses.replace(entry, expected=entry.expected + 1),))
print(certificate_problems(cert)[:3])


# # Random sweeps
#
# The same check runs on many random targets.

# In[4]:

rng = random.Random(0)
ok = sum(verify_certificate(run_reduction(random_target(rng))) for _ in range(200))
print(ok, "of 200 verified")
