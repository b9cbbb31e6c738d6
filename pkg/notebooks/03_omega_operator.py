# # The Omega operator
#
# Constraints between consecutive parts are encoded by auxiliary variables
# lambda. Omega keeps only the terms whose lambda exponents are all
# non-negative and then sets every lambda to 1.

# In[1]:

from partan.omega import (
    ALL, G1, ALL_RULES, Factor, RuleId, SumExpr, check_rule, expand_expr, omega_ge, verify_crude,
)
from partan.series import TruncationContext
from partan.identities import check_conjecture

# A toy case: x^a y^b with a >= b collapses to 1/((1-x)(1-xy)).

# In[2]:

ctx = TruncationContext.build(["x", "y", "l"], 4, lambdas=["l"])
x, y, l = ctx.var("x"), ctx.var("y"), ctx.var("l")
expr = SumExpr.of(ctx.one(), Factor.geom_inv(x * l), Factor.geom_inv(y / l))
print(omega_ge(expand_expr(expr, ctx)))

# The elimination rules, each checked as a series identity.

# In[3]:

for rule in list(ALL_RULES) + [RuleId("CHI", k) for k in range(3)]:
    print(check_rule(rule, 10).to_text())

# Crude generating functions for partitions of a fixed length, compared to
# the enumerated refined series.

# In[4]:

print(verify_crude(G1, "exact", 3, 10).to_text())
print(verify_crude(ALL, "bounded", 3, 8).to_text())

# The residue-class generalisation is tested, not proved; reports carry the
# label "evidence".

# In[5]:

print(check_conjecture({0, 1}, 2, 20).to_text())
