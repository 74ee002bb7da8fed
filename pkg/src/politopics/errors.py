"""Exception hierarchy shared across the toolkit."""


class PolitopicsError(Exception):
    """Base class for all toolkit errors."""


class CorpusParseError(PolitopicsError):
    """A corpus/rules file line could not be parsed; carries the line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class IntegrityError(PolitopicsError):
    """A structural invariant is violated (e.g. duplicate document id)."""


class RuleValidationError(PolitopicsError):
    """A topic rule set is malformed (empty pattern, missing fields)."""


class EmbeddingFormatError(PolitopicsError):
    """An embedding file violates its header contract."""

    def __init__(self, message, record_index=None):
        if record_index is not None:
            message = f"record {record_index}: {message}"
        super().__init__(message)
        self.record_index = record_index


class TrainingError(PolitopicsError):
    """Training preconditions failed (e.g. single-class input)."""


class ConvergenceError(TrainingError):
    """The SMO solver hit its iteration cap; carries the achieved KKT gap."""

    def __init__(self, message, kkt_violation):
        super().__init__(f"{message} (KKT violation {kkt_violation:.3e})")
        self.kkt_violation = kkt_violation


class InputError(PolitopicsError):
    """A prediction-time input does not match the model (e.g. dimension)."""


class EvaluationError(PolitopicsError):
    """An evaluation precondition failed (fold counts, undefined rates)."""
