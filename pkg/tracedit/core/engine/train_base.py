"""
Train the base transformer by next-token prediction over prompt+label
sequences.
"""

from tracedit.core.autodiff import GradientTape
from tracedit.core.autodiff import functional as F
from tracedit.core.model import ModelConfig, BaseParams, init_model, forward
from tracedit.core.optim import OptimizerState, optimizer_step
from tracedit.core.rng import RngStream
from tracedit.core.data import OBJECTIVES
from tracedit.core.errors import NonFiniteError, TrainingDivergedError, GateError
from tracedit.corpus import pad_batch
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_choice
from tracedit._private.interface import progress_bar
from tracedit._private.logger import log
from .batches import batch_indexes
from .evaluate import evaluate_accuracy
from .metrics import Metrics

import numpy as np

import time
from dataclasses import dataclass, asdict, fields


# "shuffle" counter of the first base-training epoch
EPOCH_COUNTER = 2**35

@dataclass
class BaseTrainConfig:
    """
    Base model training hyperparameters.

    Parameters
    ----------
    objective : str, default="absc"
        "absc": the label continuation is the polarity toward the queried
        aspect. "aspect-blind": the label continuation is the polarity
        toward the first aspect mentioned in the sentence, whatever aspect
        is queried (a base that knows the format and the sentiment words but
        not aspect conditioning).
    epochs : int, default=20
        passes over the training prompts
    batch_size : int, default=32
        sequences per step
    lr : float, default=1e-3
        AdamW learning rate
    weight_decay : float, default=0.01
        decoupled weight decay
    label_weight : float, default=4.0
        weight of the label token relative to the other next-token targets
    gate : float, default=0.95
        required final training accuracy on the objective's labels
    seed : int, default=0
        seed of the batch shuffle
    """

    objective: str = "absc"
    epochs: int = 20
    batch_size: int = 32
    lr: float = 1e-3
    weight_decay: float = 0.01
    label_weight: float = 4.0
    gate: float = 0.95
    seed: int = 0

    def __post_init__(self):

        self.objective = check_choice(self.objective,OBJECTIVES,"objective")
        self.epochs = check_int(self.epochs,"epochs",minimum_allowed=1)
        self.batch_size = check_int(self.batch_size,"batch_size",minimum_allowed=1)
        self.lr = check_float(self.lr,"lr",minimum_allowed=0,minimum_inclusive=False)
        self.weight_decay = check_float(self.weight_decay,"weight_decay",minimum_allowed=0)
        self.label_weight = check_float(self.label_weight,"label_weight",
                                        minimum_allowed=0,minimum_inclusive=False)
        self.gate = check_float(self.gate,"gate",minimum_allowed=0,maximum_allowed=1)
        self.seed = check_int(self.seed,"seed",minimum_allowed=0)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls,values):
        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized BaseTrainConfig keys: {sorted(unknown)}\n\n"
            raise ValueError(err)
        return cls(**values)


def language_model_loss(params,prompts,label_weight=1.0):
    """
    Weighted mean next-token negative log likelihood over prompt+label
    sequences. Position t predicts token t+1; the final prompt position
    predicts the gold label token with weight label_weight.

    Parameters
    ----------
    params : BaseParams
        parameters (requires_grad for training)
    prompts : list of PromptRendering
        batch
    label_weight : float, default=1.0
        weight of the label target

    Returns
    -------
    Tensor
        scalar loss
    """

    tokens, lengths = pad_batch(prompts)
    B, T = tokens.shape

    targets = np.zeros((B,T),dtype=np.int64)
    weights = np.zeros((B,T),dtype=np.float64)
    for b, p in enumerate(prompts):
        n = p.length
        targets[b,:n - 1] = p.token_ids[1:]
        targets[b,n - 1] = p.gold_id
        weights[b,:n - 1] = 1.0
        weights[b,n - 1] = label_weight

    logits, _ = forward(tokens,params)
    V = logits.shape[-1]
    logp = F.log_softmax(logits.reshape(B*T,V),axis=-1)
    nll = -F.pick(logp,targets.reshape(-1))

    w = weights.reshape(-1)/weights.sum()
    return (nll*w).sum()

def prompt_verbalizer(prompts):
    """
    Label to token id dictionary built from the prompts' gold labels.
    Raises ValueError if one label maps to two token ids.
    """

    verbalizer = {}
    for p in prompts:
        if verbalizer.setdefault(p.gold_label,int(p.gold_id)) != int(p.gold_id):
            err = f"\nlabel '{p.gold_label}' maps to token ids {verbalizer[p.gold_label]} "
            err += f"and {p.gold_id}\n\n"
            raise ValueError(err)

    return verbalizer

def train_base(prompts,model_config,train_config=None,verbalizer=None,
               precision="f32",verbose=False):
    """
    Train a base model from scratch.

    Parameters
    ----------
    prompts : list of PromptRendering
        training prompts, rendered with the objective's labels (see
        tracedit.corpus.render_all)
    model_config : ModelConfig
        model dimensions (vocab_size must cover the prompts)
    train_config : BaseTrainConfig, optional
        hyperparameters (default BaseTrainConfig())
    verbalizer : dict, optional
        dictionary keying label to token id. Defaults to the gold_label to
        gold_id pairs found in prompts, so the accuracy gate always runs.
    precision : str, default="f32"
        "f32" or "f64"
    verbose : bool, default=False
        show progress

    Returns
    -------
    params : BaseParams
        trained parameters (requires_grad=False)
    metrics : Metrics
        loss curve and final training accuracy

    Raises
    ------
    TrainingDivergedError
        loss became non-finite
    GateError
        final training accuracy below train_config.gate
    """

    if train_config is None:
        train_config = BaseTrainConfig()

    if not issubclass(type(model_config),ModelConfig):
        err = f"\nmodel_config should be a ModelConfig, not {type(model_config)}\n\n"
        raise ValueError(err)

    if len(prompts) == 0:
        err = "\ntrain_base needs a non-empty corpus\n\n"
        raise ValueError(err)

    for p in prompts:
        if p.token_ids.max() >= model_config.vocab_size or p.gold_id >= model_config.vocab_size:
            err = f"\nsample {p.sample_id} has tokens outside the vocabulary "
            err += f"(vocab_size {model_config.vocab_size})\n\n"
            raise ValueError(err)

    if verbalizer is None:
        verbalizer = prompt_verbalizer(prompts)

    start = time.time()
    params = init_model(model_config,precision=precision).with_grad()
    state = OptimizerState(dict(params.items()),
                           lr=train_config.lr,
                           weight_decay=train_config.weight_decay)

    loss_curve = []
    n_steps = train_config.epochs*int(np.ceil(len(prompts)/train_config.batch_size))
    with progress_bar(verbose,total=n_steps,desc="base training") as pbar:

        for epoch in range(train_config.epochs):

            gen = RngStream("shuffle",train_config.seed,counter=EPOCH_COUNTER + epoch).generator()
            for batch in batch_indexes(len(prompts),train_config.batch_size,gen):

                batch_prompts = [prompts[i] for i in batch]
                try:
                    with GradientTape() as tape:
                        loss = language_model_loss(params,batch_prompts,
                                                   train_config.label_weight)
                    grads = tape.backward(loss,[t for _, t in params.items()])
                    grads = {name:grads[t] for name, t in params.items()}
                    new_params, state = optimizer_step(dict(params.items()),grads,state)
                except NonFiniteError as e:
                    err = f"\nbase training diverged at step {len(loss_curve)} (loss NaN/Inf)\n\n"
                    log(err.strip())
                    raise TrainingDivergedError(err) from e

                params = BaseParams(model_config,new_params)
                loss_curve.append(loss.item())
                pbar.update(1)
                pbar.set_postfix(loss=f"{loss_curve[-1]:.4f}")

    params = params.with_grad(False)

    accuracy = evaluate_accuracy(params,None,prompts,verbalizer).accuracy

    metrics = Metrics(accuracy=accuracy,
                      mean_loss=float(np.mean(loss_curve)),
                      loss_curve=loss_curve,
                      seed=train_config.seed,
                      runtime=time.time() - start,
                      n_samples=len(prompts),
                      config={"model":model_config.to_dict(),
                              "train":train_config.to_dict()})

    if accuracy < train_config.gate:
        err = f"\nbase model reached {accuracy:.3f} training accuracy, below the\n"
        err += f"required {train_config.gate:.3f}. Increase the training budget\n"
        err += "(epochs, d_model, or lr).\n\n"
        log(err.strip())
        raise GateError(err)

    if verbose:
        log(f"base training done: final loss {loss_curve[-1]:.4f}, "
            f"training accuracy {accuracy:.3f}")

    return params, metrics
