"""Exception types raised across the package."""


class InvalidInput(ValueError):
    """Input array has the wrong shape, non-finite entries, or violates a precondition."""


class SingularMatrix(InvalidInput):
    pass


class RankDeficient(InvalidInput):
    pass


class CutLocus(ValueError):
    """Two subspaces have a principal angle of pi/2; the Log map is undefined."""


class PairAtCutLocus(CutLocus):
    def __init__(self, i, j, message=None):
        self.i = int(i)
        self.j = int(j)
        super().__init__(message or f"points {self.i} and {self.j} are at the cut locus")


class ParseError(ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(ValueError):
    pass
