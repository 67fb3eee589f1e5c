"""Exception hierarchy shared by every layer of the package."""


class MLBuchiError(Exception):
    """Base class for all errors raised by mlbuchi."""


class UnsupportedAtom(MLBuchiError):
    """An atom uses a relation or term shape the theory cannot handle."""


class NotASentence(MLBuchiError):
    """A closed formula was required but free variables remain."""


class MissingBinding(MLBuchiError):
    """An assignment does not cover every free variable of a formula."""


class EliminationFailure(MLBuchiError):
    """Quantifier elimination left the supported fragment."""


class ArityMismatch(MLBuchiError):
    pass


class TheoryMismatch(MLBuchiError):
    pass


class ConstantsUnsupported(MLBuchiError):
    pass


class WitnessUnsupported(MLBuchiError):
    pass


class NotFinite(MLBuchiError):
    pass


class NonAdmissibleTheory(MLBuchiError):
    pass


class NotAChain(MLBuchiError):
    pass


class MalformedMachine(MLBuchiError):
    pass


class UnknownRelation(UnsupportedAtom):
    """A relation symbol outside the signature."""


class ProfileLimitExceeded(MLBuchiError):
    """The transition-profile monoid grew past the configured cap."""


class ParseError(MLBuchiError, SyntaxError):
    """Surface-syntax error.

    ``token`` is the 1-based index of the offending token and ``column``
    the 0-based character offset in the source text.
    """

    def __init__(self, message, text="", token=0, column=0):
        self.token = token
        self.column = column
        self.source = text
        super().__init__(f"{message} (token {token}, column {column})")
