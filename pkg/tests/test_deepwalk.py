"""Walk generation, skip-gram training dynamics, and embedding scoring."""

import io

import numpy as np
import pytest

import netgen
from leakbench import (
    Embeddings,
    Graph,
    dump_embeddings,
    generate_walks,
    score_embedding,
    train_skipgram,
)
from leakbench.deepwalk import (
    _sgd_block,
    skipgram_pair_gradients,
    skipgram_pair_loss,
)


class TestWalks:
    def test_forced_alternation_on_an_edge(self):
        g = netgen.path(2)
        corpus = generate_walks(g, walks_per_node=2, walk_length=10, seed=0)
        for walk in corpus.walks:
            assert all(abs(int(a) - int(b)) == 1 for a, b in zip(walk, walk[1:]))

    def test_consecutive_steps_are_edges(self):
        g = netgen.gnp(40, 0.1, 2)
        corpus = generate_walks(g, 3, 15, seed=1)
        for walk in corpus.walks:
            for a, b in zip(walk, walk[1:]):
                assert g.has_edge(int(a), int(b))

    def test_walk_count_excludes_isolated_starts(self):
        g = Graph(5, [(0, 1), (1, 2)])  # nodes 3, 4 isolated
        corpus = generate_walks(g, 4, 6, seed=0)
        assert len(corpus.walks) == 4 * 3
        assert all(int(w[0]) in (0, 1, 2) for w in corpus.walks)

    def test_deterministic_for_seed(self):
        g = netgen.gnp(30, 0.12, 3)
        a = generate_walks(g, 5, 12, seed=7)
        b = generate_walks(g, 5, 12, seed=7)
        assert all(np.array_equal(x, y) for x, y in zip(a.walks, b.walks))

    def test_next_step_is_uniform_over_neighbors(self, triangle):
        corpus = generate_walks(triangle, 50, 80, seed=5)
        transitions = {0: [], 1: [], 2: []}
        for walk in corpus.walks:
            for a, b in zip(walk, walk[1:]):
                transitions[int(a)].append(int(b))
        for node, nexts in transitions.items():
            nexts = np.array(nexts)
            n = len(nexts)
            assert n > 3000
            smaller = np.count_nonzero(nexts == nexts.min())
            # binomial(n, 1/2): stay within 3 sigma of the mean
            assert abs(smaller - n / 2) < 3 * np.sqrt(n * 0.25)

    def test_argument_validation(self, triangle):
        with pytest.raises(ValueError):
            generate_walks(triangle, 0, 5, seed=0)
        with pytest.raises(ValueError):
            generate_walks(triangle, 1, 0, seed=0)


class TestSkipgramObjective:
    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(12)
        max_rel = 0.0
        for _ in range(5):
            x = rng.normal(size=6)
            y = rng.normal(size=6)
            negs = rng.normal(size=(4, 6))
            gx, gy, gn = skipgram_pair_gradients(x, y, negs)
            h = 1e-6

            def fd(setter, base):
                grads = np.zeros_like(base, dtype=float)
                it = np.nditer(base, flags=["multi_index"])
                for _ in it:
                    idx = it.multi_index
                    up, dn = base.copy(), base.copy()
                    up[idx] += h
                    dn[idx] -= h
                    grads[idx] = (setter(up) - setter(dn)) / (2 * h)
                return grads

            fx = fd(lambda v: skipgram_pair_loss(v, y, negs), x)
            fy = fd(lambda v: skipgram_pair_loss(x, v, negs), y)
            fn = fd(lambda v: skipgram_pair_loss(x, y, v), negs)
            for got, want in ((gx, fx), (gy, fy), (gn, fn)):
                scale = np.maximum(np.abs(want), 1e-8)
                max_rel = max(max_rel, float(np.max(np.abs(got - want) / scale)))
        assert max_rel < 1e-5

    def test_update_kernel_matches_pair_gradients(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(6, 5))
        contexts = rng.normal(size=(6, 5))
        v0, c0 = vectors.copy(), contexts.copy()
        lr = 0.1
        # one pair: center 0, context 1, negatives 2 and 3 (all distinct)
        _sgd_block(
            vectors, contexts,
            np.array([0]), np.array([1]), np.array([[2, 3]]),
            lr, 1e-4, 0, 10,
        )
        gx, gy, gn = skipgram_pair_gradients(v0[0], c0[1], c0[[2, 3]])
        lr_used = lr * (1.0 - 0.0 / 10)
        assert np.allclose(vectors[0], v0[0] - lr_used * gx, atol=1e-12)
        assert np.allclose(contexts[1], c0[1] - lr_used * gy, atol=1e-12)
        assert np.allclose(contexts[[2, 3]], c0[[2, 3]] - lr_used * gn, atol=1e-12)


class TestTraining:
    def test_zero_epochs_returns_initialization(self):
        g = netgen.gnp(20, 0.2, 1)
        corpus = generate_walks(g, 2, 8, seed=0)
        emb = train_skipgram(corpus, dim=4, epochs=0, seed=5)
        assert np.all(np.abs(emb.vectors) <= 0.5 / 4)
        assert not emb.context_vectors.any()
        again = train_skipgram(corpus, dim=4, epochs=0, seed=5)
        assert np.array_equal(emb.vectors, again.vectors)

    def test_bit_identical_reruns(self):
        g = netgen.gnp(30, 0.15, 2)
        corpus = generate_walks(g, 3, 10, seed=1)
        a = train_skipgram(corpus, dim=8, epochs=3, seed=4)
        b = train_skipgram(corpus, dim=8, epochs=3, seed=4)
        assert np.array_equal(a.vectors, b.vectors)
        assert np.array_equal(a.context_vectors, b.context_vectors)
        assert a.epoch_losses == b.epoch_losses

    def test_loss_decreases_on_structured_graph(self):
        g = netgen.two_cliques(6, bridge=True)
        corpus = generate_walks(g, 20, 20, seed=3)
        emb = train_skipgram(corpus, dim=8, epochs=6, seed=1)
        losses = emb.epoch_losses
        lead = np.mean(losses[: len(losses) // 2])
        trail = np.mean(losses[len(losses) // 2 :])
        assert trail < lead

    def test_clique_members_embed_closer_than_strangers(self):
        g = netgen.two_cliques(5)
        corpus = generate_walks(g, 20, 20, seed=2)
        emb = train_skipgram(corpus, dim=8, epochs=5, seed=7)
        x = emb.vectors / np.linalg.norm(emb.vectors, axis=1, keepdims=True)
        cos = x @ x.T
        intra = np.mean([cos[u, v] for u in range(5) for v in range(u + 1, 5)])
        inter = np.mean([cos[u, v + 5] for u in range(5) for v in range(5)])
        assert intra > inter

    def test_empty_corpus_rejected(self):
        g = netgen.gnp(10, 0.2, 1)
        corpus = generate_walks(g, 1, 3, seed=0)
        empty = type(corpus)(walks=[], n_nodes=10, walks_per_node=1, walk_length=3, seed=0)
        with pytest.raises(ValueError):
            train_skipgram(empty, dim=4)

    def test_dim_validation(self):
        g = netgen.gnp(10, 0.3, 1)
        corpus = generate_walks(g, 1, 5, seed=0)
        with pytest.raises(ValueError):
            train_skipgram(corpus, dim=1)


class TestScoring:
    def test_dot_scores_are_symmetric(self):
        g = netgen.gnp(20, 0.2, 5)
        corpus = generate_walks(g, 2, 10, seed=1)
        emb = train_skipgram(corpus, dim=4, epochs=1, seed=1)
        a = score_embedding(emb, [(1, 3), (4, 2)]).scores
        b = score_embedding(emb, [(3, 1), (2, 4)]).scores
        assert np.array_equal(a, b)

    def test_identical_vectors_score_squared_norm(self):
        vecs = np.array([[1.0, 2.0], [1.0, 2.0], [0.5, -1.0]])
        emb = Embeddings(dim=2, vectors=vecs, context_vectors=np.zeros_like(vecs))
        assert score_embedding(emb, [(0, 1)]).scores[0] == pytest.approx(5.0)

    def test_intra_clique_pair_outranks_inter(self):
        g = netgen.two_cliques(5)
        corpus = generate_walks(g, 20, 20, seed=2)
        emb = train_skipgram(corpus, dim=8, epochs=5, seed=7)
        intra = score_embedding(emb, [(0, 1)]).scores[0]
        inter = score_embedding(emb, [(0, 5)]).scores[0]
        assert intra > inter

    def test_cosine_metric_and_validation(self):
        g = netgen.gnp(15, 0.25, 1)
        corpus = generate_walks(g, 2, 8, seed=0)
        emb = train_skipgram(corpus, dim=4, epochs=1, seed=0)
        cos = score_embedding(emb, [(0, 1)], metric="cosine").scores[0]
        assert -1.0 - 1e-12 <= cos <= 1.0 + 1e-12
        with pytest.raises(ValueError):
            score_embedding(emb, [(0, 1)], metric="euclid")
        with pytest.raises(ValueError):
            score_embedding(emb, [(0, 99)])

    def test_dump_format(self):
        g = netgen.gnp(6, 0.5, 3)
        corpus = generate_walks(g, 1, 4, seed=0)
        emb = train_skipgram(corpus, dim=3, epochs=1, seed=0)
        buf = io.StringIO()
        dump_embeddings(emb, g.labels, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == f"{g.n} 3"
        assert len(lines) == g.n + 1
        assert len(lines[1].split()) == 4
