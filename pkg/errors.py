"""Exception hierarchy shared by services and commands"""


class MuniclusterError(Exception):
    """Base error; exit_code is what the CLI returns when it escapes a command"""

    exit_code = 1
    title = 'Analysis failed'

    def with_context(self, context):
        """Return a copy of this error with a stage/variable prefix, same class"""
        return type(self)(f"{context}: {self}")


class InputValidationError(MuniclusterError, ValueError):
    """Malformed input data or invalid configuration"""

    exit_code = 2
    title = 'Invalid input'


class NumericError(MuniclusterError, ArithmeticError):
    """A quantity is undefined for the data given (constant input, zero mass...)"""

    exit_code = 3
    title = 'Numeric failure'
