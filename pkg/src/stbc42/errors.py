"""Exception types shared across the package."""


class Stbc42Error(Exception):
    """Base class for all package errors."""


class RankDeficient(Stbc42Error):
    """A matrix handed to the QR factorization is (numerically) rank deficient."""


class UnsupportedOrder(Stbc42Error, ValueError):
    """Requested constellation order is not a supported square QAM size."""


class LengthMismatch(Stbc42Error, ValueError):
    """Bit/symbol sequence length does not match the mapping granularity."""


class UnknownCode(Stbc42Error, ValueError):
    """Requested code name is not one of the implemented codewords."""


class BudgetExceeded(Stbc42Error):
    """An exhaustive enumeration would exceed the configured candidate budget."""


class StructureViolation(Stbc42Error):
    """The upper-triangular factor does not show the sparsity pattern the
    conditional decoder relies on (wrong code or wrong column ordering)."""
