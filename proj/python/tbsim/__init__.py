from ._tbsim import *  # noqa: F401,F403
from ._tbsim import __doc__  # noqa: F401
