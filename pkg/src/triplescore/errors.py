"""Exception hierarchy shared across the package.

Two failure families matter to callers: input/format problems (CLI exit
code 2) and numerical/fit problems (CLI exit code 3). Everything derives
from TripleScoreError so library users can catch broadly.
"""


class TripleScoreError(Exception):
    pass


class InputFormatError(TripleScoreError):
    """Bad input data or files. CLI maps this family to exit code 2."""


class MalformedLineError(InputFormatError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class DuplicateKeyError(InputFormatError):
    def __init__(self, key, path=None):
        where = f" in {path}" if path else ""
        super().__init__(f"duplicate key {key!r}{where}")
        self.key = key


class DimensionMismatchError(InputFormatError):
    pass


class MalformedRecordError(InputFormatError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class DuplicatePersonError(InputFormatError):
    def __init__(self, key, path=None):
        where = f" in {path}" if path else ""
        super().__init__(f"duplicate person record {key!r}{where}")
        self.key = key


class RelationMismatchError(InputFormatError):
    pass


class EmptyUniverseError(InputFormatError):
    pass


class EmptyTrainingSetError(InputFormatError):
    pass


class EmptyInputError(InputFormatError):
    pass


class TooFewEntitiesError(InputFormatError):
    pass


class ArtifactError(InputFormatError):
    """Model artifact file is malformed or incompatible."""


class ZeroVectorError(TripleScoreError):
    """Cosine similarity is undefined for a zero-norm vector.

    Raised instead of silently returning 0 so data problems surface;
    feature extraction catches it and applies the missing-value policy.
    """


class FitError(TripleScoreError):
    """Model fitting failed. CLI maps this family to exit code 3."""


class DegenerateLabelsError(FitError):
    pass


class NonFiniteError(FitError):
    pass
