"""Retail discounting walkthrough.

A retailer wants a new price for a product whose sales are lagging.  Her
cost is 5, her current list price is high, and one competitor sells an
essentially identical product.  We walk through three levels of
uncertainty about the world, from a fully known benchmark to the full
model where both the rival's price and the customer's behavior are
uncertain, and watch the recommended price move.

Run:  python demos/retail_discounting.py
"""

import numpy as np

from araprice import RngStream, optimize_price, parse_scenario, bundled_case


def show(title, curve, around=None):
    print(f"\n{title}")
    print(f"  optimal price      : {curve.optimum}")
    print(f"  expected utility   : {curve.optimum_utility:.3f}")
    print(f"  acceptance at opt. : {curve.accept_at_optimum:.3f}")
    if around is not None:
        lo, hi = around
        mask = (curve.prices >= lo) & (curve.prices <= hi)
        print("  price   accept   exp.utility")
        for p, a, u in zip(
            curve.prices[mask], curve.accept_prob[mask], curve.expected_utility[mask]
        ):
            marker = "  <-- optimum" if p == curve.optimum else ""
            print(f"  {p:5.1f}   {a:6.3f}   {u:10.3f}{marker}")


# ---------------------------------------------------------------------
# 1. Benchmark: the rival's price is known (30) and the customer simply
#    buys the cheaper product (tiny probit noise).  The best move is to
#    undercut by one grid step.
# ---------------------------------------------------------------------
case1 = parse_scenario(bundled_case("retail_case1"))
curve1 = optimize_price(case1.params, RngStream(case1.seed))
show("1. known rival, deterministic customer", curve1, around=(28.0, 31.0))

# ---------------------------------------------------------------------
# 2. Same known rival price, but now the customer's price sensitivity is
#    uncertain: the probit noise variance carries an inverse-gamma prior,
#    which marginalizes to a Student-t acceptance curve.  Hedging against
#    customers who might not pick the cheaper shop pulls the price down.
# ---------------------------------------------------------------------
case2 = parse_scenario(bundled_case("retail_case2"))
curve2 = optimize_price(case2.params, RngStream(case2.seed))
show("2. known rival, noisy customer", curve2, around=(26.0, 30.0))

# ---------------------------------------------------------------------
# 3. Full model: the rival's price is forecast by solving her pricing
#    problem under our beliefs about her beliefs (she thinks our price
#    will stay near its current level), repeated to build a forecast
#    distribution.  The optimum now hedges against both uncertainties.
# ---------------------------------------------------------------------
case3 = parse_scenario(bundled_case("retail_case3"))
curve3 = optimize_price(case3.params, RngStream(case3.seed))
show("3. uncertain rival and customer", curve3, around=(27.0, 32.0))

print("\nforecast spread across seeds (full model):")
optima = []
for seed in range(1, 11):
    optima.append(optimize_price(case3.params, RngStream(seed)).optimum)
print(f"  optima over 10 seeds: {sorted(optima)}")
print(f"  median: {np.median(optima)}")

print(
    "\nNote the shared sanity pattern: acceptance is highest at the cheap end, "
    "expected utility vanishes at both extremes (no margin at cost, no sales "
    "when priced far above the rival), and more uncertainty means a more "
    "defensive price."
)
