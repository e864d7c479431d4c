"""Shared exception types."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge or produced a degenerate result.

    Raised for quadrature non-convergence, eigensolver failures, and
    degenerate pencil inputs. Invalid arguments raise ``ValueError`` instead.
    """
