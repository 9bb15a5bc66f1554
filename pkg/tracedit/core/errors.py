"""
Exceptions raised by tracedit calculations.
"""

class NonFiniteError(FloatingPointError):
    """
    A tensor primitive produced NaN or Inf.
    """

    def __init__(self,op_name):
        self.op_name = op_name
        err = f"\noperation '{op_name}' produced a non-finite value (NaN or Inf)\n\n"
        super().__init__(err)

class TapeError(RuntimeError):
    """
    A GradientTape was used incorrectly (consumed twice, loss not recorded).
    """
    pass

class CheckpointError(ValueError):
    """
    A checkpoint container could not be read or validated.
    """
    pass

class TrainingDivergedError(RuntimeError):
    """
    Loss became non-finite during training.
    """
    pass

class GateError(RuntimeError):
    """
    A trained model did not reach its required accuracy.
    """
    pass

class NoRetainedSamplesError(ValueError):
    """
    No traced sample met the expected-prediction filter.
    """
    pass
