"""
Container for nodewrap exceptions
"""


class CorpusValidationError(ValueError):
    """Base class for errors caused by invalid input data or configuration"""


class UnparseableDocument(CorpusValidationError):
    """Error raised when no DOM tree can be recovered from an HTML document"""


class DanglingXPath(CorpusValidationError):
    """Error raised when a label file references a page or xpath that does not exist"""


class UnknownAttribute(CorpusValidationError):
    """Error raised when a label names an attribute outside the attribute set"""


class ConflictingLabel(CorpusValidationError):
    """Error raised when one node is labeled with two different attributes"""


class InsufficientLabeledPages(CorpusValidationError):
    """Error raised when a seed website has too few labeled pages for the requested split"""


class InsufficientPages(CorpusValidationError):
    """Error raised when a website has too few pages for the requested test split"""


class NoValidationEntries(CorpusValidationError):
    """Error raised when the validation set holds no entry for a website or page"""


class OverlappingSiteSets(CorpusValidationError):
    """Error raised when seed and target websites are not disjoint"""


class InvalidConfig(CorpusValidationError):
    """Error raised when a training configuration violates its constraints"""


class UnsoundLabelingFunction(CorpusValidationError):
    """Error raised when a labeling function returns nodes not human-labeled with its attribute"""


class DegeneratePrediction(ArithmeticError):
    """Error raised when a model produces a non-finite probability"""
