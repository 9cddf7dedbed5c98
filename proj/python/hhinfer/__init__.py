from ._hhinfer import *  # noqa: F401,F403
