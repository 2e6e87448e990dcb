"""Exception hierarchy. Every structural rejection carries a concrete witness."""


class MTLForestError(Exception):
    """Base class for all library errors."""


class CapExceeded(MTLForestError):
    """An enumeration would exceed the configured size cap."""


class ParseError(MTLForestError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


# ---------------------------------------------------------------- posets

class PosetError(MTLForestError):
    pass


class NotReflexive(PosetError):
    def __init__(self, i: int):
        super().__init__(f"relation not reflexive at element {i}")
        self.witness = (i,)


class NotAntisymmetric(PosetError):
    def __init__(self, i: int, j: int):
        super().__init__(f"antisymmetry fails: {i} <= {j} and {j} <= {i}")
        self.witness = (i, j)


class NotTransitive(PosetError):
    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"transitivity fails: {i} <= {j} <= {k} but not {i} <= {k}")
        self.witness = (i, j, k)


class NotAForest(PosetError):
    def __init__(self, a: int, x: int, y: int):
        super().__init__(f"downset of {a} contains incomparable pair ({x}, {y})")
        self.witness = (a, x, y)


class MalformedTerm(MTLForestError):
    """Ill-formed forest grammar term."""


class NotADownset(MTLForestError):
    def __init__(self, i: int, j: int):
        super().__init__(f"set contains {j} but not {i} <= {j}")
        self.witness = (i, j)


class NotNested(MTLForestError):
    """Restriction target is not contained in the source downset."""


# ---------------------------------------------------------------- algebras

class ValidationError(MTLForestError):
    """An algebra presentation violates an axiom; subclasses carry witnesses."""


class BoundsWrong(ValidationError):
    pass


class NotLattice(ValidationError):
    def __init__(self, reason: str, witness: tuple):
        super().__init__(f"lattice axiom fails ({reason}) at {witness}")
        self.reason = reason
        self.witness = witness


class NotMonoid(ValidationError):
    def __init__(self, reason: str, witness: tuple):
        super().__init__(f"monoid axiom fails ({reason}) at {witness}")
        self.reason = reason
        self.witness = witness


class NotCommutative(ValidationError):
    def __init__(self, x: int, y: int):
        super().__init__(f"product not commutative at ({x}, {y})")
        self.witness = (x, y)


class ResiduationFails(ValidationError):
    def __init__(self, x: int, y: int, z: int):
        super().__init__(f"residuation fails at ({x}, {y}, {z})")
        self.witness = (x, y, z)


class PrelinearityFails(ValidationError):
    def __init__(self, x: int, y: int):
        super().__init__(f"prelinearity fails at ({x}, {y})")
        self.witness = (x, y)


class NotAChain(MTLForestError):
    def __init__(self, x: int, y: int):
        super().__init__(f"elements {x} and {y} are incomparable")
        self.witness = (x, y)


class NotIdempotent(MTLForestError):
    def __init__(self, x: int):
        super().__init__(f"element {x} is not idempotent")
        self.witness = (x,)


class NotHomomorphism(MTLForestError):
    def __init__(self, op: str, x: int, y: int):
        super().__init__(f"map does not preserve {op} at ({x}, {y})")
        self.op = op
        self.witness = (x, y)


class EmptyFamily(MTLForestError):
    """Ordinal sums and direct products need at least one part."""


class NotRepresentable(MTLForestError):
    def __init__(self, e: int, y: int):
        super().__init__(f"idempotent {e} is not a local unit: witness y = {y}")
        self.witness = (e, y)


class NotMatching(MTLForestError):
    def __init__(self, alpha: int, beta: int, node: int):
        super().__init__(
            f"sections {alpha} and {beta} disagree on overlap node {node}")
        self.witness = (alpha, beta, node)
