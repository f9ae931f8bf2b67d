"""Train the hierarchical credibility classifier on a toy dataset and
inspect an attention-backed prediction.

Eight claims with vocabulary-separable evidence overfit within a few
hundred epochs; the prediction averages one forward pass per aspect kind
per document, and the attention map turns into per-sentence highlight
intensities (the most salient sentence is always exactly 1.0).
"""

import numpy as np

from brenda import sadhan
from brenda.nn import TrainConfig
from brenda.sadhan import SadhanDims, SadhanParams
from brenda.textproc import Claim, EmbeddingTable, build_vocabulary

TRUE_WORDS = ["confirmed", "verified", "accurate", "official", "records", "show"]
FALSE_WORDS = ["hoax", "debunked", "fabricated", "myth", "retracted", "wrong"]

rng = np.random.default_rng(5)
examples = []
for text, label, aspects in [
    ("the vaccine reduces severe illness", "true", {"topic": "health"}),
    ("the bridge opened last spring", "true", {"topic": "city"}),
    ("exports grew eight percent", "true", {"author": "ann"}),
    ("the reservoir reached capacity", "true", {}),
    ("covid-19 can be cured by bleach", "false", {"topic": "health"}),
    ("the moon landing was staged", "false", {"topic": "space"}),
    ("the senator owns a gold mine", "false", {"author": "bob"}),
    ("drinking seawater cures thirst", "false", {}),
]:
    pool = TRUE_WORDS if label == "true" else FALSE_WORDS
    doc = [[*rng.choice(pool, size=3).tolist(), "the", "report"] for _ in range(2)]
    examples.append(sadhan.SadhanExample(Claim(text, aspects=aspects), [doc], label))

corpus = [list(ex.claim.tokens) for ex in examples]
corpus += [toks for ex in examples for doc in ex.documents for toks in doc]
table = EmbeddingTable.random(build_vocabulary(corpus, 1), 16, seed=6)

dims = SadhanDims(embed_dim=16, hidden=8, aspect_dim=8, att_dim=16)
params = SadhanParams.init(dims, sadhan.collect_aspect_values(examples), seed=7)
config = TrainConfig(learning_rate=0.001, keep_prob=1.0, epochs=300,
                     batch_size=8, seed=8, optimizer="adam")

print("training the hierarchical classifier on 8 toy examples ...")
result = sadhan.train(examples, config, params, table)
metrics = sadhan.evaluate(result.params, examples, table)
print(f"  true-class acc {metrics['true_acc']:.2f}, "
      f"false-class acc {metrics['false_acc']:.2f}, "
      f"macro-F1 {metrics['macro_f1']:.2f}, AUC {metrics['auc']:.2f}")

claim = examples[4].claim  # the covid-bleach claim
docs = examples[4].documents
verdict = sadhan.predict(claim, docs, result.params, table)
print(f"\nclaim: {claim.text!r} (aspects {claim.aspects})")
print(f"  P(true)={verdict.prob_true:.3f}  P(false)={verdict.prob_false:.3f}")
print(f"  per-aspect: {verdict.aspect_probabilities}")

print("\nattention-backed evidence (sentence intensity, top word):")
attn = verdict.attention_maps[0]
for sentence_tokens, intensity, word_weights in sadhan.extract_evidence(attn, docs[0]):
    top = sentence_tokens[int(np.argmax(word_weights))]
    print(f"  intensity={intensity:.3f}  top-word={top!r}  "
          f"sentence={' '.join(sentence_tokens)!r}")
