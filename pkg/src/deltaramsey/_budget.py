import os

ENV_VAR = "DELTARAMSEY_BUDGET_NODES"
EXHAUSTIVE_CARRIER = 1 << 16
DEFAULT_NODES = 1_000_000


def resolve(explicit, carrier_size=0):
    """Node budget for a search: explicit value, then the env override, then
    unlimited for carriers up to 2**16 and ``DEFAULT_NODES`` beyond."""
    if explicit is not None:
        return explicit
    env = os.environ.get(ENV_VAR)
    if env:
        return int(env)
    if carrier_size <= EXHAUSTIVE_CARRIER:
        return None
    return DEFAULT_NODES
