# # Partition families and the brute-force oracle
#
# The oracle enumerates partitions directly and builds their generating
# function. Every analytic formula is compared against it.

# In[1]:

from partan.identities import base_context, check_identity, product_side, sum_side
from partan.partitions import G1, PLAIN, alt_sum, brute_series, conjugate, gen_partitions, is_member

# Members of the first family up to weight 7:

# In[2]:

for n in range(8):
    print(n, [lam for lam in gen_partitions(n) if is_member(G1, lam)])

# The alternating sum of a partition equals the number of odd parts of its
# conjugate.

# In[3]:

lam = (6, 4, 3, 1)
print(alt_sum(lam), conjugate(lam))

# Plain and alternating-sum generating functions from the oracle.

# In[4]:

ctx = base_context(12)
print([brute_series(G1, PLAIN, ctx).coeff(q=n) for n in range(13)])
print([sum_side("LG1", ctx).coeff(q=n) for n in range(13)])
print([product_side("LG1", ctx).coeff(q=n) for n in range(13)])

# A full check returns a report with the three sides compared.

# In[5]:

report = check_identity("LG1", 40)
print(report.to_text())
print(report.to_json())
