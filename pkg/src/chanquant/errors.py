"""Exception hierarchy shared by all modules."""


class ChannelError(ValueError):
    """Base class for every error raised by chanquant."""


class NonStochastic(ChannelError):
    """A probability vector or channel row does not sum to one."""


class NegativeEntry(ChannelError):
    pass


class DegenerateInput(ChannelError):
    """Fewer than two input letters survive pruning."""


class OutOfRange(ChannelError):
    pass


class DivergenceInfinite(ChannelError):
    """Binary KL divergence is infinite (support mismatch)."""


class NotBinary(ChannelError):
    pass


class NotSorted(ChannelError):
    pass


class BudgetTooSmall(ChannelError):
    pass


class ExtremeRemoved(ChannelError):
    """A surviving set is missing the minimal or maximal posterior symbol."""


class ZeroMass(ChannelError):
    pass


class DegenerateTail(ChannelError):
    """A prefix event X_1 = ... = X_{i-1} = 0 has zero probability."""


class SupportTooLarge(ChannelError):
    pass


class PartialQuantizer(ChannelError):
    pass


class TooLargeForOracle(ChannelError):
    pass


class TooLarge(ChannelError):
    pass
