from codeeq._codeeq import *  # noqa: F401,F403
from codeeq._codeeq import transform_kinds  # noqa: F401
