"""Exception types. Every error carries a stable ``code`` string."""


class DiscourseLensError(Exception):
    code = "ERROR"


class ConfigInvalid(DiscourseLensError):
    code = "CONFIG_INVALID"


class CorpusIOError(DiscourseLensError):
    code = "IO_ERROR"


class SchemaError(DiscourseLensError):
    code = "SCHEMA_ERROR"

    def __init__(self, line, column, reason, path=None):
        self.line = line
        self.column = column
        self.reason = reason
        self.path = path
        where = f"{path}:" if path else ""
        col = f":{column}" if column is not None else ""
        super().__init__(f"{where}{line}{col}: {reason}")


class LabelError(DiscourseLensError):
    code = "LABEL_ERROR"

    def __init__(self, line, label, view, path=None):
        self.line = line
        self.label = label
        self.view = view
        self.path = path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}: unknown {view} label {label!r}")


class ValidationFailed(DiscourseLensError):
    """Raised when a corpus carries error-severity validation issues."""

    code = "VALIDATION_ERROR"

    def __init__(self, report):
        self.report = report
        first = report.errors[0] if report.errors else None
        detail = f": {first.code} at {first.location}" if first else ""
        super().__init__(f"{len(report.errors)} validation error(s){detail}")


class InvalidPair(DiscourseLensError):
    code = "INVALID_PAIR"


class ConfigMismatch(DiscourseLensError):
    code = "CONFIG_MISMATCH"
