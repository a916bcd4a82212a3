class BanditClusterError(Exception):
    pass


class BudgetExhausted(BanditClusterError):
    """Raised when a sampling request would push the ledger past its cap."""

    def __init__(self, total, cap, requested=1):
        super().__init__(
            f"budget cap {cap} reached (spent {total}, requested {requested} more)"
        )
        self.total = total
        self.cap = cap
        self.requested = requested


class IndexOutOfRange(BanditClusterError, IndexError):
    pass


class InvalidInstance(BanditClusterError, ValueError):
    pass


class DegenerateLabels(InvalidInstance):
    pass


class DomainError(BanditClusterError, ValueError):
    pass


class InvalidBudget(BanditClusterError, ValueError):
    pass


class EmptyItemSet(BanditClusterError, ValueError):
    pass


class InsufficientBudget(BanditClusterError, ValueError):
    pass


class ZeroGap(BanditClusterError, ValueError):
    pass


class ConfigError(BanditClusterError, ValueError):
    pass
