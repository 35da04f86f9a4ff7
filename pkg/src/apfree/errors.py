class BudgetExceeded(RuntimeError):
    """A search hit its node, pair or depth budget before finishing.

    ``partial`` carries whatever the caller can report about the work done so
    far (a partial count, a partial table, ...).
    """

    def __init__(self, message, *, nodes=None, partial=None):
        super().__init__(message)
        self.nodes = nodes
        self.partial = partial
