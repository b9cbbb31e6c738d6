# # Truncated Laurent series
#
# Every identity in partan is checked by expanding both sides as exact
# integer series up to a fixed weighted degree. This walk-through shows the
# building blocks.

# In[1]:

from partan.series import LaurentPoly, TruncationContext, pochhammer_finite, pochhammer_infinite

# A context fixes the variables, their weights and the truncation order.
# Here z has weight 0, so only the power of q decides what is kept.

# In[2]:

ctx = TruncationContext.build(["z", "q"], 8, weights={"z": 0})
z, q = ctx.var("z"), ctx.var("q")
print(ctx)

# Monomials multiply freely; a LaurentPoly holds integer coefficients.

# In[3]:

p = LaurentPoly.monomial(ctx, z * q) + LaurentPoly.monomial(ctx, q**2, 3)
print(p)
print(p * p)

# Finite and infinite q-Pochhammer symbols. With base -z they generate
# partitions into distinct parts counted by number of parts.

# In[4]:

print(pochhammer_finite(-z * q, q, 3, ctx))
distinct = pochhammer_infinite(-z * q, q, ctx)
print(distinct.coeff(z=2, q=7))  # 7 = 6+1 = 5+2 = 4+3

# The reciprocal of (q;q)_inf counts all partitions.

# In[5]:

qctx = TruncationContext.build(["q"], 10)
parts = pochhammer_infinite(qctx.var("q"), qctx.var("q"), qctx, invert=True)
print([parts.coeff(q=n) for n in range(11)])
