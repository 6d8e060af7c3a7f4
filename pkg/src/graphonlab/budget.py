"""Elementary-operation budgets for density computations.

Every density routine estimates its cost (number of multiply-add steps over
block assignments) before running and refuses loudly if the estimate exceeds
the budget.  The default budget is 1e8 operations; the environment variable
``GRAPHONLAB_BUDGET`` overrides it process-wide, and every operation also
accepts an explicit ``budget=`` argument.
"""

import os

DEFAULT_BUDGET = 10**8

# Enumeration runs in interpreted code, so it is only preferred over the
# elimination DP below this cost.
ENUM_CROSSOVER = 200_000


def resolve_budget(budget=None):
    """Return the effective operation budget for a single call."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("GRAPHONLAB_BUDGET")
    if env is not None:
        try:
            return int(float(env))
        except ValueError:
            raise ValueError(f"GRAPHONLAB_BUDGET is not a number: {env!r}") from None
    return DEFAULT_BUDGET
