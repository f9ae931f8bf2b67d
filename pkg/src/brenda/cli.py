"""Command-line interface: train, evaluate, score, predict and serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import checkpoint as ckpt
from . import sadhan as sadhan_mod
from . import worthiness as worthiness_mod
from .nn import TrainConfig
from .textproc import EmbeddingTable, build_vocabulary, content_tokens, load_embeddings, segment_sentences, tokenize


@click.group()
def main():
    """brenda: claim check-worthiness ranking and credibility classification."""


# ---------------------------------------------------------------------------
# worthiness subcommands
# ---------------------------------------------------------------------------

@main.group()
def worthiness():
    """Claim check-worthiness classifier."""


@worthiness.command("train")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True),
              help="TSV file with sentence<TAB>label lines.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Checkpoint file to write.")
@click.option("--epochs", default=50, show_default=True)
@click.option("--lr", default=0.001, show_default=True)
@click.option("--batch-size", default=16, show_default=True)
@click.option("--hidden", default=64, show_default=True)
@click.option("--embed-dim", default=100, show_default=True)
@click.option("--optimizer", default="adam", show_default=True,
              type=click.Choice(["sgd", "adam"]))
@click.option("--embeddings", "emb_path", type=click.Path(exists=True),
              help="Optional word-vector file for the embedding table.")
@click.option("--seed", default=0, show_default=True)
def worthiness_train(data_path, out_path, epochs, lr, batch_size, hidden,
                     embed_dim, optimizer, emb_path, seed):
    """Train the check-worthiness classifier on a labeled TSV."""
    dataset = worthiness_mod.read_worthiness_tsv(data_path)
    config = TrainConfig(learning_rate=lr, keep_prob=1.0, epochs=epochs,
                         batch_size=batch_size, seed=seed, optimizer=optimizer)
    table = None
    if emb_path:
        vocab = build_vocabulary(
            [content_tokens(text) for text, _ in dataset], min_count=1)
        with open(emb_path, encoding="utf-8") as fh:
            table = load_embeddings(fh, vocab, embed_dim, seed=seed)
    result = worthiness_mod.train_worthiness(
        dataset, config, hidden_size=hidden, embed_dim=embed_dim, table=table)
    model_id = ckpt.save_worthiness(out_path, result.model)
    metrics = worthiness_mod.evaluate_worthiness(result.model, dataset)
    click.echo(f"saved {out_path} (model {model_id}); "
               f"training micro-F1 {metrics['micro_f1']:.3f}")


@worthiness.command("score")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--text", required=True,
              help="Sentence or article text; @path reads a file, '-' reads stdin.")
@click.option("--threshold", default=0.0, show_default=True)
@click.option("--top-k", default=0, show_default=True,
              help="Keep at most this many sentences (0 = all).")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
def worthiness_score(model_path, text, threshold, top_k, as_json):
    """Score the sentences of TEXT for check-worthiness."""
    model, _ = ckpt.load_worthiness(model_path)
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        text = Path(text[1:]).read_text(encoding="utf-8")
    sentences = segment_sentences(text)
    limit = top_k if top_k > 0 else max(len(sentences), 1)
    ranked = worthiness_mod.rank_claims(model, sentences, threshold, limit)
    if as_json:
        click.echo(json.dumps([
            {"sentence": s.sentence.text, "index": s.sentence.index, "score": s.score}
            for s in ranked
        ]))
    else:
        for s in ranked:
            click.echo(f"{s.score:.4f}\t{s.sentence.text}")


# ---------------------------------------------------------------------------
# sadhan subcommands
# ---------------------------------------------------------------------------

def _load_train_config(path: str | None) -> tuple[TrainConfig, dict]:
    """Read a JSON config file holding TrainConfig fields plus 'dims'."""
    if path is None:
        return TrainConfig(), {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    dims = raw.pop("dims", {})
    return TrainConfig(**raw), dims


@main.group()
def sadhan():
    """Hierarchical aspect-guided credibility classifier."""


@sadhan.command("train")
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True),
              help="Directory of example dirs (claim.txt, label, aspects, evidence/).")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON file with TrainConfig fields and optional 'dims'.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--embeddings", "emb_path", type=click.Path(exists=True))
def sadhan_train(data_dir, config_path, out_path, emb_path):
    """Train the credibility classifier on a directory of examples."""
    dataset = sadhan_mod.load_training_dir(data_dir)
    config, dims_kw = _load_train_config(config_path)
    dims = sadhan_mod.SadhanDims(**dims_kw)
    corpus = [list(ex.claim.tokens) for ex in dataset]
    corpus += [toks for ex in dataset for doc in ex.documents for toks in doc]
    vocab = build_vocabulary(corpus, min_count=1)
    if emb_path:
        with open(emb_path, encoding="utf-8") as fh:
            table = load_embeddings(fh, vocab, dims.embed_dim, seed=config.seed)
    else:
        table = EmbeddingTable.random(vocab, dims.embed_dim, seed=config.seed)
    params = sadhan_mod.SadhanParams.init(
        dims, sadhan_mod.collect_aspect_values(dataset), seed=config.seed)
    result = sadhan_mod.train(dataset, config, params, table)
    model_id = ckpt.save_sadhan(out_path, result.params, table)
    metrics = sadhan_mod.evaluate(result.params, dataset, table)
    click.echo(f"saved {out_path} (model {model_id}); "
               f"training macro-F1 {metrics['macro_f1']:.3f}")


@sadhan.command("eval")
@click.option("--ckpt", "ckpt_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--folds", default=0, show_default=True,
              help="If > 0, run k-fold cross-validation (retrains per fold).")
@click.option("--config", "config_path", type=click.Path(exists=True))
def sadhan_eval(ckpt_path, data_dir, folds, config_path):
    """Evaluate a checkpoint (or run k-fold CV) on a data directory."""
    dataset = sadhan_mod.load_training_dir(data_dir)
    params, table, _ = ckpt.load_sadhan(ckpt_path)
    if folds > 0:
        config, dims_kw = _load_train_config(config_path)
        dims = sadhan_mod.SadhanDims(**dims_kw) if dims_kw else params.dims
        report = sadhan_mod.cross_validate(dataset, config, dims, table, folds=folds)
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo(json.dumps(sadhan_mod.evaluate(params, dataset, table), indent=2))


@sadhan.command("predict")
@click.option("--ckpt", "ckpt_path", required=True, type=click.Path(exists=True))
@click.option("--claim", "claim_text", required=True)
@click.option("--evidence", "evidence_dir", required=True,
              type=click.Path(exists=True),
              help="Directory of .txt files, one evidence document each.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
def sadhan_predict(ckpt_path, claim_text, evidence_dir, as_json):
    """Classify CLAIM against the documents in EVIDENCE_DIR."""
    params, table, _ = ckpt.load_sadhan(ckpt_path)
    docs = []
    for doc_file in sorted(Path(evidence_dir).glob("*.txt")):
        sentences = segment_sentences(doc_file.read_text(encoding="utf-8"))
        docs.append([tokenize(s.text) for s in sentences])
    claim = sadhan_mod.Claim(claim_text)
    result = sadhan_mod.predict(claim, docs, params, table)
    if as_json:
        click.echo(json.dumps({
            "prob_true": result.prob_true,
            "prob_false": result.prob_false,
            "credibility_score": result.score,
        }))
    else:
        click.echo(f"P(true)={result.prob_true:.4f} P(false)={result.prob_false:.4f}")


# ---------------------------------------------------------------------------
# service
# ---------------------------------------------------------------------------

@main.command("serve")
@click.option("--host", default=None, help="Override BIND_ADDR host.")
@click.option("--port", default=None, type=int, help="Override BIND_ADDR port.")
def serve(host, port):
    """Run the REST service (configuration from the environment)."""
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.from_env()
    cfg_host, _, cfg_port = config.bind_addr.partition(":")
    uvicorn.run(create_app(config),
                host=host or cfg_host or "127.0.0.1",
                port=port or int(cfg_port or 8080))


if __name__ == "__main__":
    main()
