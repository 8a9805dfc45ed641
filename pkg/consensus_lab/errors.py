class ConsensusLabError(Exception):
    """Base class of all errors raised by consensus_lab"""

    pass


class DomainError(ConsensusLabError, ValueError):
    """Exception raised when inputs violate a precondition or a hypothesis"""

    pass


class InputFileError(DomainError):
    """Exception raised when an input file cannot be parsed"""

    def __init__(self, msg, filepath=None, lineno=None):
        self.filepath = filepath
        self.lineno = lineno
        location = []
        if filepath is not None:
            location.append(str(filepath))
        if lineno is not None:
            location.append("line {}".format(lineno))
        if location:
            msg = "{}: {}".format(", ".join(location), msg)
        super().__init__(msg)


class GraphFileError(InputFileError):
    """Exception raised when a graph file cannot be parsed"""

    pass


class TraceFileError(InputFileError):
    """Exception raised when a binary trace dump is malformed"""

    pass


class NumericError(ConsensusLabError, ArithmeticError):
    """Exception raised when a numerical routine fails or results disagree"""

    def __init__(self, msg, matrix_id=None):
        self.matrix_id = matrix_id
        if matrix_id is not None:
            msg = "{} [matrix: {}]".format(msg, matrix_id)
        super().__init__(msg)


class ResourceError(ConsensusLabError):
    """Exception raised when a problem exceeds the configured size guards"""

    pass


class NoReaderWriterError(ConsensusLabError, ValueError):
    """Exception raised when a valid Reader or Writer could not be found for the file"""

    pass


class UsageError(ConsensusLabError):
    """Exception raised on invalid command line usage"""

    pass
