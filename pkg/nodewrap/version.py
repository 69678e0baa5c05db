"""Place of record for the package version"""

__version__ = "0.1.0"
__git_hash__ = "GIT_HASH"
