"""Exception hierarchy. The CLI maps each class to an exit code."""


class NucertError(Exception):
    exit_code = 1


class InputError(NucertError, ValueError):
    """Malformed or non-geometric input."""

    exit_code = 1


class PreconditionError(InputError):
    """An operation was called outside the range where its inequality applies."""


class SolverError(NucertError, RuntimeError):
    exit_code = 2

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class SearchError(NucertError, RuntimeError):
    exit_code = 2


class CertificationError(NucertError):
    exit_code = 3


class ContractError(NucertError, AssertionError):
    """A result object does not satisfy the contract the callee relies on."""

    exit_code = 3
