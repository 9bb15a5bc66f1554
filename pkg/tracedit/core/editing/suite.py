"""
EditSuite: the trainable edit parameters attached to a frozen base model.
"""

from tracedit.core.autodiff import Tensor
from tracedit.core.model.config import ModelConfig
from tracedit.core.rng import RngStream
from tracedit._private.check.standard import check_int
from tracedit._private.check.tracedit import check_layers
from tracedit._private.check.tracedit import check_position_policy
from tracedit._private.check.tracedit import check_edit_mode
from tracedit._private.check.tracedit import check_rank
from tracedit._private.check.tracedit import check_precision
from tracedit._private.utility import array_checksum
from .ops import reorthonormalize

import numpy as np

# Edit-suite draws live far from the base-model counters of the "init"
# stream so a suite seed equal to the model init_seed never replays them.
EDIT_INIT_COUNTER = 2**32

WEIGHT_NAMES = ("A","B")
REP_NAMES = ("R","W_star","b")

class EditSuite:
    """
    Edit parameters theta = {A_l, B_l, R_l, W*_l, b_l} over target layers.

    Parameters
    ----------
    config : ModelConfig
        config of the base model the suite attaches to
    layers : list-like of int
        1-based target layers
    r_w : int
        weight-edit rank
    r_rep : int
        representation-edit rank
    tensors : dict
        dictionary keying "layer{l}.{A,B,R,W_star,b}" to Tensor
    policy : str, default="aspect"
        position policy for representation edits (aspect, last, mid)
    mode : str, default="hybrid"
        hybrid (both edits), weight (low-rank weight edit only), or rep
        (representation edit only)
    seed : int, default=0
        seed the suite was initialized from (recorded, not used here)
    """

    def __init__(self,config,layers,r_w,r_rep,tensors,
                 policy="aspect",mode="hybrid",seed=0):

        if not issubclass(type(config),ModelConfig):
            err = f"\nconfig should be a ModelConfig, not {type(config)}\n\n"
            raise ValueError(err)

        self._config = config
        self._layers = check_layers(layers,config.n_layers)
        self._r_w = check_rank(r_w,config.d_model,"r_w")
        self._r_rep = check_rank(r_rep,config.d_model,"r_rep")
        self._policy = check_position_policy(policy)
        self._mode = check_edit_mode(mode)
        self._seed = check_int(seed,"seed",minimum_allowed=0)

        expected = self.parameter_shapes()
        if set(expected) != set(tensors):
            missing = sorted(set(expected) - set(tensors))
            extra = sorted(set(tensors) - set(expected))
            err = "\nedit tensors do not match the suite layout.\n"
            err += f"    missing: {missing}\n    unexpected: {extra}\n\n"
            raise ValueError(err)

        self._tensors = {}
        for name, shape in expected.items():
            t = tensors[name]
            if not issubclass(type(t),Tensor):
                t = Tensor(np.asarray(t),requires_grad=True,name=name)
            if tuple(t.shape) != shape:
                err = f"\n'{name}' has shape {t.shape}, expected {shape}\n\n"
                raise ValueError(err)
            self._tensors[name] = t

    # ------------------------------------------------------------------------
    # Layout

    def parameter_shapes(self):
        """
        Ordered dictionary of parameter name to shape for this suite.
        """

        d = self._config.d_model
        shapes = {}
        for l in self._layers:
            if self.has_weight_edit:
                shapes[f"layer{l}.A"] = (d,self._r_w)
                shapes[f"layer{l}.B"] = (self._r_w,d)
            if self.has_rep_edit:
                shapes[f"layer{l}.R"] = (self._r_rep,d)
                shapes[f"layer{l}.W_star"] = (self._r_rep,d)
                shapes[f"layer{l}.b"] = (self._r_rep,)

        return shapes

    @property
    def has_weight_edit(self):
        return self._mode in ("hybrid","weight")

    @property
    def has_rep_edit(self):
        return self._mode in ("hybrid","rep")

    # ------------------------------------------------------------------------
    # Hooks read by the forward pass

    def weight_edit(self,layer):
        """
        (A, B) for layer, or None if the layer carries no weight edit.
        """

        if not self.has_weight_edit or layer not in self._layers:
            return None
        return self._tensors[f"layer{layer}.A"], self._tensors[f"layer{layer}.B"]

    def rep_edit(self,layer):
        """
        (R, W_star, b) for layer, or None.
        """

        if not self.has_rep_edit or layer not in self._layers:
            return None
        return tuple(self._tensors[f"layer{layer}.{n}"] for n in REP_NAMES)

    # ------------------------------------------------------------------------
    # Parameters

    def parameters(self):
        """
        Dictionary keying name to Tensor (every trainable tensor).
        """
        return dict(self._tensors)

    def parameter_groups(self):
        """
        Split the parameters into the weight-edit group (A, B) and the
        representation-edit group (R, W_star, b), which train with separate
        learning rates. Empty groups are omitted.
        """

        groups = {"weight":{},"rep":{}}
        for name, t in self._tensors.items():
            kind = name.split(".",1)[1]
            if kind in WEIGHT_NAMES:
                groups["weight"][name] = t
            else:
                groups["rep"][name] = t

        return {k:v for k, v in groups.items() if len(v) > 0}

    def with_parameters(self,updates):
        """
        New suite with some tensors replaced.
        """

        tensors = dict(self._tensors)
        for name, t in updates.items():
            if name not in tensors:
                err = f"\n'{name}' is not a parameter of this suite\n\n"
                raise ValueError(err)
            tensors[name] = t

        return EditSuite(self._config,self._layers,self._r_w,self._r_rep,tensors,
                         policy=self._policy,mode=self._mode,seed=self._seed)

    def reorthonormalized(self):
        """
        New suite with every R_l re-orthonormalized.
        """

        updates = {}
        for l in self._layers:
            name = f"layer{l}.R"
            if name in self._tensors:
                updates[name] = reorthonormalize(self._tensors[name])

        return self.with_parameters(updates)

    def astype(self,precision):
        dtype = check_precision(precision)
        updates = {k:Tensor(v.data,requires_grad=v.requires_grad,dtype=dtype,name=k)
                   for k, v in self._tensors.items()}
        return self.with_parameters(updates)

    def frozen(self):
        """
        Copy with requires_grad=False everywhere (for evaluation).
        """
        updates = {k:v.detach() for k, v in self._tensors.items()}
        return self.with_parameters(updates)

    def trainable(self):
        updates = {k:Tensor(v.data,requires_grad=True,name=k)
                   for k, v in self._tensors.items()}
        return self.with_parameters(updates)

    def to_arrays(self):
        return {k:v.data for k, v in self._tensors.items()}

    def checksum(self):
        return array_checksum(self.to_arrays())

    def meta(self):
        """
        Dictionary describing the suite (written to checkpoint manifests).
        """

        return {"layers":list(self._layers),
                "r_w":self._r_w,
                "r_rep":self._r_rep,
                "policy":self._policy,
                "mode":self._mode,
                "seed":self._seed,
                "model_config":self._config.to_dict()}

    # ------------------------------------------------------------------------
    # Properties

    @property
    def config(self):
        return self._config

    @property
    def layers(self):
        return self._layers

    @property
    def r_w(self):
        return self._r_w

    @property
    def r_rep(self):
        return self._r_rep

    @property
    def policy(self):
        return self._policy

    @property
    def mode(self):
        return self._mode

    @property
    def seed(self):
        return self._seed

    def __repr__(self):
        return (f"EditSuite(layers={list(self._layers)}, mode='{self._mode}', "
                f"r_w={self._r_w}, r_rep={self._r_rep}, policy='{self._policy}')")


def init_edit_suite(config,
                    layers,
                    r_w=4,
                    r_rep=2,
                    seed=0,
                    policy="aspect",
                    mode="hybrid",
                    precision="f32"):
    """
    Initialize an edit suite that leaves the model unchanged: B_l = 0 (so
    A_l B_l = 0), W*_l = R_l and b_l = 0 (so alpha is the identity). A_l is
    N(0,1/d) and R_l is an orthonormalized N(0,1) matrix.

    Parameters
    ----------
    config : ModelConfig
        base model config
    layers : str or list-like
        target layers (band name, "4,5,6", or list of ints)
    r_w : int, default=4
        weight-edit rank
    r_rep : int, default=2
        representation-edit rank
    seed : int, default=0
        seed of the initialization draws
    policy : str, default="aspect"
        representation-edit position policy
    mode : str, default="hybrid"
        hybrid, weight, or rep
    precision : str, default="f32"
        "f32" or "f64"

    Returns
    -------
    EditSuite
        trainable (requires_grad=True) suite
    """

    if not issubclass(type(config),ModelConfig):
        err = f"\nconfig should be a ModelConfig, not {type(config)}\n\n"
        raise ValueError(err)

    layers = check_layers(layers,config.n_layers)
    d = config.d_model
    r_w = check_rank(r_w,d,"r_w")
    r_rep = check_rank(r_rep,d,"r_rep")
    mode = check_edit_mode(mode)
    seed = check_int(seed,"seed",minimum_allowed=0)
    dtype = check_precision(precision)

    stream = RngStream("init",seed,counter=EDIT_INIT_COUNTER)

    tensors = {}
    for l in layers:

        # Draw both factors regardless of mode so a layer's values do not
        # depend on which components are enabled.
        A = stream.generator().standard_normal((d,r_w))/np.sqrt(d)
        R = reorthonormalize(stream.generator().standard_normal((r_rep,d))).data

        if mode in ("hybrid","weight"):
            tensors[f"layer{l}.A"] = A
            tensors[f"layer{l}.B"] = np.zeros((r_w,d))
        if mode in ("hybrid","rep"):
            tensors[f"layer{l}.R"] = R
            tensors[f"layer{l}.W_star"] = R.copy()
            tensors[f"layer{l}.b"] = np.zeros(r_rep)

    tensors = {k:Tensor(v,requires_grad=True,dtype=dtype,name=k) for k, v in tensors.items()}

    return EditSuite(config,layers,r_w,r_rep,tensors,policy=policy,mode=mode,seed=seed)


def count_params(suite,params):
    """
    Count trainable edit parameters against the base model.

    Per target layer: d*r_w + r_w*k for the weight edit (k = d, the output
    width of the attention projection) and 2*r_rep*d + r_rep for the
    representation edit.

    Parameters
    ----------
    suite : EditSuite or None
        edit suite (None counts zero)
    params : BaseParams
        base parameters

    Returns
    -------
    trainable : int
        number of edit parameters
    base : int
        number of base parameters
    fraction : float
        trainable/base
    """

    base = params.num_params()
    if suite is None:
        return 0, base, 0.0

    d = suite.config.d_model
    k = d
    per_layer = 0
    if suite.has_weight_edit:
        per_layer += d*suite.r_w + suite.r_w*k
    if suite.has_rep_edit:
        per_layer += 2*suite.r_rep*d + suite.r_rep

    trainable = per_layer*len(suite.layers)

    return trainable, base, trainable/base
