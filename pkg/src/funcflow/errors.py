"""Exception hierarchy. Every error carries a stable machine-readable name in .code."""


class FuncflowError(Exception):
    code = "Error"

    def __init__(self, *args, **details):
        super().__init__(*args)
        self.details = details

    def __str__(self):
        base = super().__str__()
        if self.details:
            extra = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{base} ({extra})" if base else extra
        return base


class ValidationError(FuncflowError):
    """Input (network, tree, document) violates a structural invariant."""


class SolverError(FuncflowError):
    """A solver could not produce a result on a validated instance."""


# --- network validation ---

class Disconnected(ValidationError):
    code = "Disconnected"


class DuplicateEdge(ValidationError):
    code = "DuplicateEdge"


class NegativeCapacity(ValidationError):
    code = "NegativeCapacity"


class BadSourceTerminal(ValidationError):
    code = "BadSourceTerminal"


# --- computation tree validation ---

class BadDegree(ValidationError):
    code = "BadDegree"


class NotTopological(ValidationError):
    code = "NotTopological"


class NotATree(ValidationError):
    code = "NotATree"


class UnknownEdge(ValidationError):
    code = "UnknownEdge"


# --- embeddings ---

class InvalidEmbedding(ValidationError):
    code = "InvalidEmbedding"


class DimensionMismatch(ValidationError):
    code = "DimensionMismatch"


class TooMany(SolverError):
    code = "TooMany"


class Unreachable(SolverError):
    code = "Unreachable"


# --- linear programs ---

class Infeasible(SolverError):
    code = "Infeasible"


class NumericFailure(SolverError):
    code = "NumericFailure"


# --- flow decomposition ---

class InfeasibleInput(SolverError):
    code = "InfeasibleInput"


class Nontermination(SolverError):
    code = "Nontermination"


# --- primal-dual ---

class ZeroCapacity(SolverError):
    code = "ZeroCapacity"


class IterationCapExceeded(SolverError):
    code = "IterationCapExceeded"


# --- extensions ---

class AllWeightsZero(ValidationError):
    code = "AllWeightsZero"


class NonpositiveWeight(ValidationError):
    code = "NonpositiveWeight"


class ZeroBudget(ValidationError):
    code = "ZeroBudget"


class SharedSources(ValidationError):
    code = "SharedSources"


# --- protocol ---

class EpsilonTooSmall(SolverError):
    code = "EpsilonTooSmall"


class CapacityExceeded(SolverError):
    code = "CapacityExceeded"


class QueueUnderflow(SolverError):
    code = "QueueUnderflow"


# --- documents / CLI ---

class InvalidDocument(ValidationError):
    code = "InvalidDocument"
