"""MacMahon partition analysis: truncated Laurent series, the Omega operator,
and machine checks of the little Goellnitz family of identities."""

__version__ = "0.1.0"
