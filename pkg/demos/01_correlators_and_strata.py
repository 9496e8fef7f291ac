"""Reducing correlators and splitting a stratum.

Run with ``python demos/01_correlators_and_strata.py``.
"""
from strata2rec import CorrelatorKey, StratumTerm, load_relation, reduce, split_term
from strata2rec.graphs import mark
from strata2rec.splitting import evaluate

# %% Correlators reduce to the basic series through string, dilaton and divisor.
T1, T2 = (1, 0), (2, 0)
for key in [
    CorrelatorKey(2, 2, (T1, (2, 1)) + (T2,) * 5),   # divisor: 2*P2(2)
    CorrelatorKey(2, 1, ((0, 1),) + (T2,) * 4),       # dilaton: 6*N2(1)
    CorrelatorKey(2, 0, ((1, 1),)),                   # H2(0)
]:
    print(f"{key} = {reduce(key)}")

# %% The shipped relation has 20 unassigned terms.
relation = load_relation()
print(f"\n{len(relation)} terms; first term graph:\n{relation.terms[0].graph}")

# %% Restrict a degree-1 class with T1 at every marking to the first stratum.
term = StratumTerm(1, relation.terms[0].graph)
products = split_term(term, {mark(i): 1 for i in (1, 2, 3)}, 1)
print(f"\n{len(products)} vertex products, for example:")
for c, keys in products[:3]:
    print(f"  {c} * " + " ".join(map(str, keys)))
print("sum:", evaluate(products))
