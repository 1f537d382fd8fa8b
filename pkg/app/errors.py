"""Exception hierarchy shared by the services, the CLI and the HTTP app.

Every error carries the process exit code used by ``app.cli`` and the HTTP
status used by the exception handler in ``app.main``.
"""


class ToolkitError(Exception):
    exit_code = 1
    http_status = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class PresentationParseError(ToolkitError):
    exit_code = 2
    http_status = 422

    def __init__(self, message: str, line_no: int = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class UnknownGeneratorError(PresentationParseError):
    pass


class EngineValidationError(ToolkitError):
    exit_code = 2
    http_status = 422


class CapExceededError(ToolkitError):
    exit_code = 3
    http_status = 413


class InfeasibleInstanceError(ToolkitError):
    exit_code = 4
    http_status = 409


class NotACycleError(InfeasibleInstanceError):
    pass


class NotABoundaryError(InfeasibleInstanceError):
    pass


class DisconnectedError(InfeasibleInstanceError):
    pass


class NotNullhomotopicError(InfeasibleInstanceError):
    pass


class MembershipUndecidableError(InfeasibleInstanceError):
    pass


class MissingCombingPathError(InfeasibleInstanceError):
    pass


class BudgetExhaustedError(ToolkitError):
    exit_code = 5
    http_status = 408


class ParameterError(ToolkitError):
    """Run parameter that cannot be interpreted (polynomials, table files, chain text)."""
    exit_code = 2
    http_status = 422
