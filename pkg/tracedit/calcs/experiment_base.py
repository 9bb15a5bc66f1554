"""
Base class for experiments that train and evaluate edit suites against a
frozen base model. Must be sub-classed to be used.
"""

from tracedit.core.engine import TrainConfig, train_edits, evaluate_accuracy
from tracedit.core.editing import init_edit_suite, count_params
from tracedit.corpus import Vocab, render_all, split_domains, domain_tags
from tracedit.io import load_checkpoint, read_checkpoint_manifest, read_corpus
from tracedit.io import save_checkpoint, write_manifest
from tracedit.analysis import ReportRow, write_report
from tracedit.core.model import BaseParams
from tracedit._private.check.standard import check_bool
from tracedit._private.check.standard import check_int
from tracedit._private.check.standard import check_float
from tracedit._private.check.standard import check_iter
from tracedit._private.check.tracedit import check_position_policy
from tracedit._private.check.tracedit import check_edit_mode
from tracedit._private.check.tracedit import check_precision
from tracedit._private.check.tracedit import check_layers
from tracedit._private.utility import prep_for_json
from tracedit._private.logger import log

import json
import os
from dataclasses import dataclass, asdict, fields

@dataclass
class ExperimentSpec:
    """
    Inputs shared by every experiment.

    Parameters
    ----------
    corpus : str
        corpus JSON-lines file
    base : str
        base model checkpoint (written by train-base)
    layers : str or list, default="mid"
        edit layers: band name (early, mid, late, all), "4,5,6", "4-6" or a
        list of ints
    policy : str, default="aspect"
        representation-edit position policy (aspect, last, mid)
    r_w : int, default=4
        weight-edit rank
    r_rep : int, default=2
        representation-edit rank
    mode : str, default="hybrid"
        edit suite mode (hybrid, weight, rep)
    seeds : list of int, default=[0,1,2]
        one training run per seed
    lr_w : float, default=3e-4
        weight-edit learning rate
    lr_rep : float, default=1e-5
        representation-edit learning rate
    epochs : int, default=1
        edit training epochs
    batch_size : int, default=16
        edit training batch size
    weight_decay : float, default=0.0
        edit training weight decay
    template : str, optional
        prompt template (default: the template the base was trained with)
    precision : str, default="f32"
        "f32" or "f64"
    """

    corpus: str
    base: str
    layers: object = "mid"
    policy: str = "aspect"
    r_w: int = 4
    r_rep: int = 2
    mode: str = "hybrid"
    seeds: list = None
    lr_w: float = 3e-4
    lr_rep: float = 1e-5
    epochs: int = 1
    batch_size: int = 16
    weight_decay: float = 0.0
    template: str = None
    precision: str = "f32"

    def __post_init__(self):

        if self.seeds is None:
            self.seeds = [0,1,2]
        self.seeds = check_iter(self.seeds,"seeds",minimum_allowed=1,is_not_type=str)
        self.seeds = [check_int(s,"seed",minimum_allowed=0) for s in self.seeds]

        self.policy = check_position_policy(self.policy)
        self.mode = check_edit_mode(self.mode)
        self.r_w = check_int(self.r_w,"r_w",minimum_allowed=1)
        self.r_rep = check_int(self.r_rep,"r_rep",minimum_allowed=1)
        self.lr_w = check_float(self.lr_w,"lr_w",minimum_allowed=0)
        self.lr_rep = check_float(self.lr_rep,"lr_rep",minimum_allowed=0)
        self.epochs = check_int(self.epochs,"epochs",minimum_allowed=1)
        self.batch_size = check_int(self.batch_size,"batch_size",minimum_allowed=1)
        self.weight_decay = check_float(self.weight_decay,"weight_decay",minimum_allowed=0)
        check_precision(self.precision)

    def train_config(self,seed):
        return TrainConfig(lr_w=self.lr_w,
                           lr_rep=self.lr_rep,
                           epochs=self.epochs,
                           batch_size=self.batch_size,
                           weight_decay=self.weight_decay,
                           seed=seed)

    def to_dict(self):
        return prep_for_json(asdict(self))

    @classmethod
    def from_dict(cls,values):
        allowed = {f.name for f in fields(cls)}
        unknown = set(values) - allowed
        if len(unknown) > 0:
            err = f"\nunrecognized experiment keys: {sorted(unknown)}\n\n"
            raise ValueError(err)
        return cls(**values)


def load_base(base,precision="f32"):
    """
    Load a base checkpoint and the vocabulary/template stored with it.

    Returns
    -------
    params : BaseParams
        base parameters cast to precision
    vocab : Vocab
        vocabulary the base was trained with
    extra : dict
        training information stored in the checkpoint
    """

    params = load_checkpoint(base)
    if not issubclass(type(params),BaseParams):
        err = f"\n'{base}' holds an edit suite, not a base model\n\n"
        raise ValueError(err)

    extra = read_checkpoint_manifest(base).get("extra",{})
    if "vocab" not in extra:
        err = f"\nbase checkpoint '{base}' has no stored vocabulary\n\n"
        raise ValueError(err)

    vocab = Vocab.from_dict(extra["vocab"])
    if len(vocab) > params.config.vocab_size:
        err = f"\nstored vocabulary ({len(vocab)} words) is larger than the model's "
        err += f"vocab_size ({params.config.vocab_size})\n\n"
        raise ValueError(err)

    return params.astype(precision), vocab, extra


class Experiment:
    """
    Base class for edit experiments. Subclasses set calc_type and define
    run(output_directory, ...).
    """

    calc_type = None
    run = None

    def __init__(self,spec,verbose=False):
        """
        Parameters
        ----------
        spec : ExperimentSpec or dict
            experiment inputs
        verbose : bool, default=False
            show progress bars
        """

        if issubclass(type(spec),dict):
            spec = ExperimentSpec.from_dict(spec)
        if not issubclass(type(spec),ExperimentSpec):
            err = f"\nspec should be an ExperimentSpec, not {type(spec)}\n\n"
            raise ValueError(err)

        self._spec = spec
        self._verbose = check_bool(verbose,"verbose")

        if self.__class__ is Experiment:
            err = "\nOnly subclasses of Experiment should be used\n\n"
            raise NotImplementedError(err)

        if self.calc_type is None:
            err = f"\nsubclasses of {Experiment} must define the property\n"
            err += "`calc_type`, a simple string naming the experiment.\n\n"
            raise NotImplementedError(err)

        if self.run is None:
            err = "\nsubclasses of Experiment must define a `run` function whose\n"
            err += "first argument is output_directory.\n\n"
            raise NotImplementedError(err)

        self._corpus_file = os.path.abspath(spec.corpus)
        self._base_file = os.path.abspath(spec.base)

        self._samples = read_corpus(self._corpus_file)
        self._params, self._vocab, self._base_info = load_base(self._base_file,
                                                               spec.precision)

        self._template = spec.template
        if self._template is None:
            self._template = self._base_info.get("template","default")

        # Resolve now so a bad selection fails before any training
        self._layers = check_layers(spec.layers,self._params.config.n_layers)

    # ------------------------------------------------------------------------
    # Run bookkeeping

    def _prepare_calc(self,output_directory,calc_params):
        """
        Create and move into output_directory, writing manifest.json.
        """

        if os.path.isdir(output_directory) and len(os.listdir(output_directory)) > 0:
            err = f"\noutput_directory ({output_directory}) already exists and is not empty\n\n"
            raise FileExistsError(err)

        os.makedirs(output_directory,exist_ok=True)
        self._current_dir = os.getcwd()
        os.chdir(output_directory)

        params = {"spec":self._spec.to_dict(),
                  "template":self._template,
                  "resolved_layers":list(self._layers),
                  "base_checkpoint":self._base_file,
                  "base_checksum":self._params.checksum(),
                  "corpus":self._corpus_file}
        params.update(calc_params)
        write_manifest(".",self.calc_type,params)

    def _complete_calc(self,rows):
        """
        Write the report and return to the starting directory.
        """

        df = write_report(rows,"report")

        if hasattr(self,"_current_dir"):
            os.chdir(self._current_dir)

        return df

    # ------------------------------------------------------------------------
    # Shared steps

    def _render(self,samples):
        return render_all(samples,
                          self._vocab,
                          template=self._template,
                          max_seq=self._params.config.max_seq)

    def _domain(self,domain):
        """
        Validate a domain tag, defaulting to the first domain in the corpus.
        """

        tags = domain_tags(self._samples)
        if domain is None:
            return tags[0]
        if domain not in tags:
            err = f"\ndomain '{domain}' not found. Available domains:\n"
            for t in tags:
                err += f"    {t}\n"
            raise ValueError(err + "\n")
        return domain

    def _split(self,source,target):
        return split_domains(self._samples,source,target)

    def _train_suite(self,train_prompts,layers,policy,seed):
        """
        Initialize and train one suite.
        """

        suite = init_edit_suite(self._params.config,
                                layers,
                                r_w=self._spec.r_w,
                                r_rep=self._spec.r_rep,
                                seed=seed,
                                policy=policy,
                                mode=self._spec.mode,
                                precision=self._spec.precision)

        suite, metrics = train_edits(self._params,
                                     suite,
                                     train_prompts,
                                     config=self._spec.train_config(seed),
                                     verbalizer=self._vocab.verbalizer,
                                     verbose=self._verbose)
        return suite, metrics

    def _write_run(self,tag,seed,suite,train_metrics,test_metrics):
        """
        Save one run's suite and metrics under runs/.
        """

        os.makedirs("runs",exist_ok=True)
        root = os.path.join("runs",f"{tag}_seed{seed}")
        if suite is not None:
            save_checkpoint(suite,f"{root}.ckpt")

        out = {"train":None if train_metrics is None else train_metrics.to_dict(),
               "test":test_metrics.to_dict()}
        with open(f"{root}.json","w") as f:
            json.dump(out,f,indent=2,sort_keys=True)

    def _edit_row(self,experiment,pair,train_samples,test_samples,
                  layers=None,policy=None,layer_label=None):
        """
        Train and evaluate one suite per seed and summarize them in a row.
        """

        if layers is None:
            layers = self._layers
        if policy is None:
            policy = self._spec.policy
        if layer_label is None:
            layer_label = _layer_label(self._spec.layers,layers)

        train_prompts = self._render(train_samples)
        test_prompts = self._render(test_samples)

        accuracies, contrastive = [], []
        fraction, trainable = 0.0, 0
        for seed in self._spec.seeds:

            suite, train_metrics = self._train_suite(train_prompts,layers,policy,seed)
            test_metrics = evaluate_accuracy(self._params,suite,test_prompts,
                                             self._vocab.verbalizer)

            tag = f"{experiment}_{pair}_{layer_label}_{policy}".replace("->","-to-")
            self._write_run(tag,seed,suite,train_metrics,test_metrics)

            accuracies.append(test_metrics.accuracy)
            if test_metrics.contrastive_accuracy is not None:
                contrastive.append(test_metrics.contrastive_accuracy)

            trainable, _, fraction = count_params(suite,self._params)
            log(f"{experiment} {pair} layers={layer_label} policy={policy} "
                f"seed={seed}: accuracy {test_metrics.accuracy:.4f}")

        return ReportRow(experiment=experiment,
                         domain_pair=pair,
                         layers=layer_label,
                         policy=policy,
                         trainable_fraction=fraction,
                         accuracies=accuracies,
                         contrastive_accuracies=contrastive,
                         seeds=list(self._spec.seeds),
                         mode=self._spec.mode,
                         trainable_params=trainable)

    def _baseline_row(self,pair,test_samples):
        """
        No-edit baseline: the base model scored on the same test set.
        """

        test_prompts = self._render(test_samples)
        metrics = evaluate_accuracy(self._params,None,test_prompts,self._vocab.verbalizer)

        tag = f"no-edit_{pair}".replace("->","-to-")
        self._write_run(tag,0,None,None,metrics)

        contrastive = []
        if metrics.contrastive_accuracy is not None:
            contrastive.append(metrics.contrastive_accuracy)

        return ReportRow(experiment="no-edit",
                         domain_pair=pair,
                         layers="none",
                         policy="none",
                         trainable_fraction=0.0,
                         accuracies=[metrics.accuracy],
                         contrastive_accuracies=contrastive,
                         seeds=[],
                         mode="none",
                         trainable_params=0)

    # ------------------------------------------------------------------------
    # Properties

    @property
    def spec(self):
        return self._spec

    @property
    def params(self):
        return self._params

    @property
    def vocab(self):
        return self._vocab

    @property
    def samples(self):
        return list(self._samples)

    @property
    def layers(self):
        return self._layers

    @property
    def template(self):
        return self._template


def _layer_label(requested,layers):
    """
    Band name if layers came from one, otherwise "4,5,6".
    """

    if issubclass(type(requested),str) and requested.strip().lower() in ("early","mid","late","all"):
        return requested.strip().lower()
    return ",".join(str(l) for l in layers)
