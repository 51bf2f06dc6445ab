"""Exception hierarchy shared by all modules."""


class HapvecError(Exception):
    pass


class UnstableQueue(HapvecError):
    """Offered traffic G >= c; no stationary distribution exists."""


class NoConvergence(HapvecError):
    pass


class SingularSystem(HapvecError):
    pass


class ZeroArrivalRate(HapvecError):
    pass


class NotSingleServer(HapvecError):
    pass


class ZeroRate(HapvecError):
    pass


class InfeasibleScenario(HapvecError):
    """Neither local nor offloaded processing can be made stable."""


class ConfigError(HapvecError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
