"""
Single-step pipeline commands: generate a corpus, train a base model, train
one edit suite, and score a model.
"""

from .experiment_base import load_base
from tracedit.corpus import CorpusSpec, generate_corpus, build_vocab, render_all
from tracedit.corpus import domain_tags
from tracedit.core.model import ModelConfig
from tracedit.core.engine import BaseTrainConfig, TrainConfig, train_base
from tracedit.core.engine import train_edits, evaluate_accuracy
from tracedit.core.editing import EditSuite, init_edit_suite
from tracedit.io import write_corpus, read_corpus, save_checkpoint, load_checkpoint
from tracedit.io import write_manifest, write_prompts
from tracedit._private.check.standard import check_bool
from tracedit._private.check.standard import check_choice
from tracedit._private.logger import log

import json
import os

def _select(samples,split,domain):

    if domain is not None and domain not in domain_tags(samples):
        err = f"\ndomain '{domain}' not found in the corpus\n\n"
        raise ValueError(err)

    out = [s for s in samples if s.split == split and (domain is None or s.domain == domain)]
    if len(out) == 0:
        err = f"\nno '{split}' samples"
        err += "" if domain is None else f" in domain '{domain}'"
        raise ValueError(err + "\n\n")
    return out

def _write_json(values,filename):
    with open(filename,"w") as f:
        json.dump(values,f,indent=2,sort_keys=True)

def generate_data(out="corpus.jsonl",
                  out_dir=".",
                  seed=0,
                  per_domain=1200,
                  contrastive_fraction=0.6,
                  test_fraction=0.2):
    """
    Generate the synthetic aspect sentiment corpus and write it as JSON-lines.

    Parameters
    ----------
    out : str, default="corpus.jsonl"
        corpus file name (relative names go under out_dir)
    out_dir : str, default="."
        output directory
    seed : int, default=0
        corpus seed
    per_domain : int, default=1200
        samples per domain
    contrastive_fraction : float, default=0.6
        fraction of samples from two-aspect templates
    test_fraction : float, default=0.2
        fraction of each domain placed in the test split

    Returns
    -------
    list of Sample
    """

    spec = CorpusSpec(per_domain=per_domain,
                      contrastive_fraction=contrastive_fraction,
                      test_fraction=test_fraction,
                      seed=seed)

    os.makedirs(out_dir,exist_ok=True)
    filename = out if os.path.isabs(out) else os.path.join(out_dir,out)

    samples = generate_corpus(spec,verbose=True)
    write_corpus(samples,filename)

    write_manifest(out_dir,"gen-data",{"out":filename,"corpus_spec":spec.to_dict()})
    log(f"wrote {len(samples)} samples to {filename}")
    for domain in domain_tags(samples):
        train = sum(s.domain == domain and s.split == "train" for s in samples)
        test = sum(s.domain == domain and s.split == "test" for s in samples)
        log(f"    {domain}: {train} train, {test} test")

    return samples

def train_base_model(corpus,
                     out_dir=".",
                     seed=0,
                     precision="f32",
                     objective="absc",
                     template="default",
                     n_layers=8,
                     n_heads=4,
                     d_model=128,
                     d_ff=512,
                     max_seq=64,
                     epochs=20,
                     batch_size=32,
                     lr=1e-3,
                     weight_decay=0.01,
                     label_weight=4.0,
                     gate=0.95,
                     verbose=False):
    """
    Train a base model on the corpus training split and write base.ckpt
    (with the vocabulary and template stored in its manifest) and
    metrics.json.

    Parameters
    ----------
    corpus : str
        corpus JSON-lines file
    out_dir : str, default="."
        output directory
    seed : int, default=0
        initialization and shuffle seed
    precision : str, default="f32"
        "f32" or "f64"
    objective : str, default="absc"
        "absc" (label = polarity toward the queried aspect) or
        "aspect-blind" (label = polarity toward the first-mentioned aspect)
    template : str, default="default"
        prompt template
    n_layers, n_heads, d_model, d_ff, max_seq : int
        model dimensions
    epochs, batch_size, lr, weight_decay, label_weight, gate :
        training settings (see BaseTrainConfig)
    verbose : bool, default=False
        show progress

    Returns
    -------
    params : BaseParams
    metrics : Metrics
    """

    samples = read_corpus(corpus)
    train = _select(samples,"train",None)

    vocab = build_vocab(samples)
    model_config = ModelConfig(vocab_size=len(vocab),
                               n_layers=n_layers,
                               n_heads=n_heads,
                               d_model=d_model,
                               d_ff=d_ff,
                               max_seq=max_seq,
                               init_seed=seed)
    train_config = BaseTrainConfig(objective=objective,
                                   epochs=epochs,
                                   batch_size=batch_size,
                                   lr=lr,
                                   weight_decay=weight_decay,
                                   label_weight=label_weight,
                                   gate=gate,
                                   seed=seed)

    prompts = render_all(train,vocab,template=template,max_seq=max_seq,objective=objective)

    os.makedirs(out_dir,exist_ok=True)
    write_manifest(out_dir,"train-base",{"corpus":os.path.abspath(corpus),
                                         "precision":precision,
                                         "template":template,
                                         "model":model_config.to_dict(),
                                         "train":train_config.to_dict()})

    params, metrics = train_base(prompts,model_config,train_config,
                                 verbalizer=vocab.verbalizer,
                                 precision=precision,
                                 verbose=verbose)

    extra = {"vocab":vocab.to_dict(),
             "template":template,
             "objective":objective,
             "train":train_config.to_dict(),
             "corpus":os.path.abspath(corpus)}
    save_checkpoint(params,os.path.join(out_dir,"base.ckpt"),extra=extra)
    _write_json(metrics.to_dict(),os.path.join(out_dir,"metrics.json"))

    log(f"base model: training accuracy {metrics.accuracy:.4f}, "
        f"{params.num_params()} parameters")

    return params, metrics

def train_suite(corpus,
                base,
                out_dir=".",
                seed=0,
                precision="f32",
                layers="mid",
                positions="aspect",
                rank_w=4,
                rank_rep=2,
                lr_w=3e-4,
                lr_rep=1e-5,
                epochs=1,
                batch_size=16,
                weight_decay=0.0,
                mode="hybrid",
                domain=None,
                dump_prompts=False,
                verbose=False):
    """
    Train one edit suite on the corpus training split (one domain or all)
    and write suite.ckpt and metrics.json.

    Parameters
    ----------
    corpus : str
        corpus JSON-lines file
    base : str
        base checkpoint
    out_dir : str, default="."
        output directory
    seed : int, default=0
        suite initialization and shuffle seed
    precision : str, default="f32"
        "f32" or "f64"
    layers : str, default="mid"
        early, mid, late, all, or a layer list such as "4,5,6"
    positions : str, default="aspect"
        representation-edit position policy (aspect, last, mid)
    rank_w : int, default=4
        weight-edit rank
    rank_rep : int, default=2
        representation-edit rank
    lr_w : float, default=3e-4
        weight-edit learning rate
    lr_rep : float, default=1e-5
        representation-edit learning rate
    epochs : int, default=1
        training epochs
    batch_size : int, default=16
        prompts per step
    weight_decay : float, default=0.0
        AdamW decoupled weight decay on the edit parameters
    mode : str, default="hybrid"
        hybrid, weight, or rep
    domain : str, optional
        train on one domain only
    dump_prompts : bool, default=False
        also write the rendered training prompts to prompts.jsonl
    verbose : bool, default=False
        show progress

    Returns
    -------
    suite : EditSuite
    metrics : Metrics
    """

    samples = read_corpus(corpus)
    params, vocab, info = load_base(base,precision)
    template = info.get("template","default")

    train = _select(samples,"train",domain)
    prompts = render_all(train,vocab,template=template,max_seq=params.config.max_seq)

    suite = init_edit_suite(params.config,layers,r_w=rank_w,r_rep=rank_rep,
                            seed=seed,policy=positions,mode=mode,precision=precision)
    config = TrainConfig(lr_w=lr_w,lr_rep=lr_rep,epochs=epochs,weight_decay=weight_decay,
                         batch_size=batch_size,seed=seed)

    os.makedirs(out_dir,exist_ok=True)
    write_manifest(out_dir,"edit",{"corpus":os.path.abspath(corpus),
                                   "base":os.path.abspath(base),
                                   "base_checksum":params.checksum(),
                                   "precision":precision,
                                   "domain":domain,
                                   "suite":suite.meta(),
                                   "train":config.to_dict()})
    if check_bool(dump_prompts,"dump_prompts"):
        write_prompts(prompts,os.path.join(out_dir,"prompts.jsonl"))

    suite, metrics = train_edits(params,suite,prompts,config,
                                 verbalizer=vocab.verbalizer,verbose=verbose)

    save_checkpoint(suite,os.path.join(out_dir,"suite.ckpt"))
    _write_json(metrics.to_dict(),os.path.join(out_dir,"metrics.json"))

    log(f"edit suite: training accuracy {metrics.accuracy:.4f}, "
        f"trainable fraction {metrics.trainable_fraction:.6f}")

    return suite, metrics

def evaluate_model(corpus,
                   base,
                   suite=None,
                   out_dir=".",
                   precision="f32",
                   split="test",
                   domain=None,
                   output_file="eval_metrics.json",
                   verbose=False):
    """
    Score the base model, optionally with an edit suite, and write the
    metrics as json.

    Parameters
    ----------
    corpus : str
        corpus JSON-lines file
    base : str
        base checkpoint
    suite : str, optional
        edit suite checkpoint (omit to score the base model)
    out_dir : str, default="."
        output directory
    precision : str, default="f32"
        "f32" or "f64"
    split : str, default="test"
        corpus split to score
    domain : str, optional
        score one domain only
    output_file : str, default="eval_metrics.json"
        metrics file name inside out_dir
    verbose : bool, default=False
        show progress

    Returns
    -------
    Metrics
    """

    split = check_choice(split,("train","test"),"split")

    samples = read_corpus(corpus)
    params, vocab, info = load_base(base,precision)
    template = info.get("template","default")

    edits = None
    if suite is not None:
        edits = load_checkpoint(suite)
        if not issubclass(type(edits),EditSuite):
            err = f"\n'{suite}' holds a base model, not an edit suite\n\n"
            raise ValueError(err)
        if edits.config != params.config:
            err = f"\nedit suite '{suite}' was built for a different base model config\n\n"
            raise ValueError(err)
        edits = edits.astype(precision)

    prompts = render_all(_select(samples,split,domain),vocab,template=template,
                         max_seq=params.config.max_seq)
    metrics = evaluate_accuracy(params,edits,prompts,vocab.verbalizer,verbose=verbose)

    os.makedirs(out_dir,exist_ok=True)
    write_manifest(out_dir,"eval",{"corpus":os.path.abspath(corpus),
                                   "base":os.path.abspath(base),
                                   "suite":None if suite is None else os.path.abspath(suite),
                                   "precision":precision,
                                   "split":split,
                                   "domain":domain})
    _write_json(metrics.to_dict(),os.path.join(out_dir,output_file))

    log(f"accuracy {metrics.accuracy:.4f} over {metrics.n_samples} samples")
    if metrics.contrastive_accuracy is not None:
        log(f"contrastive-subset accuracy {metrics.contrastive_accuracy:.4f}")

    return metrics
