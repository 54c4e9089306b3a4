"""Walk a question through the gated recurrent encoder step by step.

Shows tokenization, the per-token state updates, and the convex-combination
structure of the update: each new state lies between the candidate state
and the previous one.
"""

import numpy as np

from basiq.encoder import GruParameters, TokenEmbeddingTable, encode_question, gru_step, tokenize

HIDDEN, INPUT = 6, 4

rng = np.random.default_rng(42)
params = GruParameters.random(HIDDEN, INPUT, seed=42, scale=0.5)

vocab = ["what", "color", "is", "the", "car", "?"]
table = TokenEmbeddingTable(
    {tok: rng.standard_normal(INPUT) for tok in vocab}, input_dim=INPUT
)

question = "What color is the car?"
tokens = tokenize(question)
print(f"question: {question!r}")
print(f"tokens:   {tokens}")

h = np.zeros(HIDDEN)
for t, tok in enumerate(tokens, start=1):
    h_prev = h
    h = gru_step(params, h, table.vector(tok))
    bound = np.maximum(np.abs(h_prev), 1.0)
    print(f"step {t} ({tok!r:8s}) |h| max {np.abs(h).max():.4f}  "
          f"within bound {bool(np.all(np.abs(h) <= bound))}")

final = encode_question(params, table, tokens)
print(f"\nfull encoding equals the stepwise state: {np.array_equal(final, h)}")

# unknown tokens fall back to the zero embedding
mystery = encode_question(params, table, tokenize("what is a zyzzyva?"))
print(f"out-of-vocabulary question still encodes, norm {np.linalg.norm(mystery):.4f}")
