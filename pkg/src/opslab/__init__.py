"""opslab: a symbolic operator-space calculus paired with a numerical
laboratory that checks its isometric identities on small matrices."""

__version__ = "0.1.0"
