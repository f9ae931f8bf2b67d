"""Train the check-worthiness classifier and rank an article's sentences.

The score of a sentence is the softmax probability of the "claim" class;
ranking keeps sentences at or above a threshold, best first, truncated to
top-k. Training here uses the bundled synthetic separable corpus.
"""

from brenda.nn import TrainConfig
from brenda.textproc import segment_sentences
from brenda.worthiness import (
    evaluate_worthiness,
    generate_synthetic_corpus,
    rank_claims,
    train_worthiness,
)

dataset = generate_synthetic_corpus(120, seed=0)
print(f"training on {len(dataset)} synthetic sentences "
      f"({sum(1 for _, l in dataset if l == 'claim')} claims)")

config = TrainConfig(learning_rate=0.005, keep_prob=1.0, epochs=80,
                     batch_size=16, seed=0, optimizer="adam")
result = train_worthiness(dataset, config, hidden_size=16, embed_dim=16)
metrics = evaluate_worthiness(result.model, dataset)
print(f"training metrics: precision={metrics['precision']:.3f} "
      f"recall={metrics['recall']:.3f} micro-F1={metrics['micro_f1']:.3f}")
print(f"loss: {result.loss_history[0]:.4f} -> {result.loss_history[-1]:.4f}")

ARTICLE = ("Crime dropped 30 percent after the reform passed. "
           "What a wonderful morning to walk along the river. "
           "The city allocated 12 million dollars to schools. "
           "Hopefully the weather stays pleasant for the picnic.")

sentences = segment_sentences(ARTICLE)
print("\nranked check-worthy sentences (threshold 0.5, top 3):")
for scored in rank_claims(result.model, sentences, threshold=0.5, top_k=3):
    print(f"  {scored.score:.3f}  [{scored.sentence.index}] {scored.sentence.text}")
