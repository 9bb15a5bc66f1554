"""
Train an edit suite against a frozen base model.
"""

from tracedit.core.autodiff import GradientTape
from tracedit.core.rng import RngStream
from tracedit.core.optim import OptimizerState, optimizer_step
from tracedit.core.editing import EditSuite, count_params
from tracedit.core.editing import orthonormality_error, reorthonormalize
from tracedit.core.errors import NonFiniteError, TrainingDivergedError
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_int
from tracedit._private.interface import progress_bar
from tracedit._private.logger import log
from .batches import batch_indexes, final_logits, gold_ids, gold_nll
from .evaluate import evaluate_accuracy
from .metrics import Metrics

import numpy as np

import time
from dataclasses import dataclass, asdict, fields

# Tolerance on max|R R^T - I| checked after every step
ORTHONORMALITY_TOL = 1e-4

# "shuffle" counter of the first epoch's batch order
EPOCH_COUNTER = 2**34

@dataclass
class TrainConfig:
    """
    Edit training hyperparameters.

    Parameters
    ----------
    lr_w : float, default=3e-4
        learning rate of the weight-edit group (A, B)
    lr_rep : float, default=1e-5
        learning rate of the representation-edit group (R, W_star, b)
    epochs : int, default=1
        passes over the training prompts
    batch_size : int, default=16
        prompts per step
    weight_decay : float, default=0.0
        decoupled weight decay for both groups
    seed : int, default=0
        seed of the batch shuffle
    betas : tuple, default=(0.9,0.999)
        AdamW moment decay rates
    eps : float, default=1e-8
        AdamW denominator offset
    """

    lr_w: float = 3e-4
    lr_rep: float = 1e-5
    epochs: int = 1
    batch_size: int = 16
    weight_decay: float = 0.0
    seed: int = 0
    betas: tuple = (0.9,0.999)
    eps: float = 1e-8

    def __post_init__(self):

        # Learning rates of 0 are accepted so a run can be made a no-op
        self.lr_w = check_float(self.lr_w,"lr_w",minimum_allowed=0)
        self.lr_rep = check_float(self.lr_rep,"lr_rep",minimum_allowed=0)
        self.epochs = check_int(self.epochs,"epochs",minimum_allowed=1)
        self.batch_size = check_int(self.batch_size,"batch_size",minimum_allowed=1)
        self.weight_decay = check_float(self.weight_decay,"weight_decay",minimum_allowed=0)
        self.seed = check_int(self.seed,"seed",minimum_allowed=0)
        self.betas = tuple(self.betas)
        self.eps = check_float(self.eps,"eps",minimum_allowed=0,minimum_inclusive=False)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls,values):
        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized TrainConfig keys: {sorted(unknown)}\n\n"
            raise ValueError(err)
        return cls(**values)


def edit_loss(params,suite,prompts):
    """
    Mean negative log probability of each prompt's gold label token under the
    edited model. Run inside a GradientTape to differentiate with respect to
    the suite.

    Parameters
    ----------
    params : BaseParams
        frozen base parameters
    suite : EditSuite
        edit suite (attached during the forward pass)
    prompts : list of PromptRendering
        non-empty batch

    Returns
    -------
    Tensor
        scalar loss
    """

    if len(prompts) == 0:
        err = "\nedit_loss needs a non-empty batch\n\n"
        raise ValueError(err)

    if not issubclass(type(suite),EditSuite):
        err = f"\nsuite should be an EditSuite, not {type(suite)}\n\n"
        raise ValueError(err)

    gold = gold_ids(prompts,params.config.vocab_size)
    logits = final_logits(params,prompts,suite)
    return gold_nll(logits,gold).mean()

def _max_orthonormality(suite):
    errors = [orthonormality_error(suite.rep_edit(l)[0]) for l in suite.layers
              if suite.rep_edit(l) is not None]
    return max(errors,default=0.0)

def train_edits(params,suite,prompts,config=None,verbalizer=None,verbose=False):
    """
    Minimize edit_loss over the suite parameters only. Base parameters are
    never modified. The weight-edit and representation-edit groups each get
    their own AdamW state and learning rate. Every R_l an optimizer step
    changed is re-orthonormalized right after the step.

    Parameters
    ----------
    params : BaseParams
        frozen base parameters
    suite : EditSuite
        initial suite
    prompts : list of PromptRendering
        training prompts (non-empty)
    config : TrainConfig, optional
        hyperparameters (default TrainConfig())
    verbalizer : dict, optional
        dictionary keying label to token id. If given, training accuracy
        is scored after training.
    verbose : bool, default=False
        show a progress bar

    Returns
    -------
    suite : EditSuite
        trained suite (requires_grad=False)
    metrics : Metrics
        loss curve, training accuracy, trainable fraction, runtime
    """

    if config is None:
        config = TrainConfig()

    if len(prompts) == 0:
        err = "\ntrain_edits needs a non-empty training set\n\n"
        raise ValueError(err)

    start = time.time()
    base_checksum = params.checksum()

    suite = suite.trainable()
    lrs = {"weight":config.lr_w,"rep":config.lr_rep}
    states = {}
    for group, group_params in suite.parameter_groups().items():
        states[group] = OptimizerState(group_params,
                                       lr=lrs[group],
                                       betas=config.betas,
                                       eps=config.eps,
                                       weight_decay=config.weight_decay)

    loss_curve = []
    ortho_max = _max_orthonormality(suite)

    n_steps = config.epochs*int(np.ceil(len(prompts)/config.batch_size))
    with progress_bar(verbose,total=n_steps,desc="edit training") as pbar:

        for epoch in range(config.epochs):

            gen = RngStream("shuffle",config.seed,counter=EPOCH_COUNTER + epoch).generator()
            for batch in batch_indexes(len(prompts),config.batch_size,gen):

                batch_prompts = [prompts[i] for i in batch]
                try:
                    with GradientTape() as tape:
                        loss = edit_loss(params,suite,batch_prompts)
                    flat = suite.parameters()
                    grads = tape.backward(loss,list(flat.values()))
                except NonFiniteError as e:
                    err = f"\nedit training diverged at step {len(loss_curve)}\n\n"
                    raise TrainingDivergedError(err) from e

                updates = {}
                for group, group_params in suite.parameter_groups().items():
                    group_grads = {k:grads[t] for k, t in group_params.items()}
                    new_params, states[group] = optimizer_step(group_params,
                                                               group_grads,
                                                               states[group])
                    updates.update(new_params)

                # Re-orthonormalize the subspaces this step moved
                for l in suite.layers:
                    name = f"layer{l}.R"
                    if name in updates and not np.array_equal(updates[name].data,
                                                              flat[name].data):
                        updates[name] = reorthonormalize(updates[name])

                suite = suite.with_parameters(updates)

                step_ortho = _max_orthonormality(suite)
                ortho_max = max(ortho_max,step_ortho)
                if step_ortho > ORTHONORMALITY_TOL:
                    err = f"\nR lost orthonormality ({step_ortho:.3e}) at step {len(loss_curve)}\n\n"
                    raise RuntimeError(err)

                loss_curve.append(loss.item())
                pbar.update(1)
                pbar.set_postfix(loss=f"{loss_curve[-1]:.4f}")

    if params.checksum() != base_checksum:
        err = "\nbase parameters changed during edit training\n\n"
        raise RuntimeError(err)

    suite = suite.frozen()
    trainable, _, fraction = count_params(suite,params)

    accuracy = 0.0
    if verbalizer is not None:
        accuracy = evaluate_accuracy(params,suite,prompts,verbalizer).accuracy

    metrics = Metrics(accuracy=accuracy,
                      mean_loss=float(np.mean(loss_curve)),
                      loss_curve=loss_curve,
                      trainable_fraction=fraction,
                      seed=config.seed,
                      runtime=time.time() - start,
                      n_samples=len(prompts),
                      orthonormality_max=ortho_max,
                      config={"train":config.to_dict(),
                              "suite":suite.meta(),
                              "trainable_params":trainable})

    if verbose:
        log(f"edit training done: mean loss {metrics.mean_loss:.4f}, "
            f"{trainable} trainable parameters ({100*fraction:.4f}% of base)")

    return suite, metrics
