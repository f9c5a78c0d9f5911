import numpy as np
import pytest

from chartlab.numcore import (
    PrngStream,
    Tensor,
    add,
    backward,
    build_tape,
    causal_mask,
    concat,
    cross_entropy_with_logits,
    embedding_gather,
    finite_diff_check,
    gelu,
    layer_norm,
    matmul,
    mean_all,
    mul,
    random_tensor,
    reshape,
    scale,
    slice_axis,
    softmax,
    sum_all,
    transpose,
)


def test_square_gradient():
    x = Tensor(3.0, requires_grad=True)
    loss = mul(x, x)
    grads = backward(loss, [x])
    assert grads[x] == pytest.approx(6.0)


def test_cross_entropy_gradient_is_probs_minus_onehot():
    rng = PrngStream(10)
    logits = random_tensor(rng, (3, 5))
    targets = np.array([0, 3, 2])
    nll = cross_entropy_with_logits(logits, targets)
    grads = backward(sum_all(nll), [logits])
    p = softmax(Tensor(logits.data), axis=-1).data
    onehot = np.zeros_like(p)
    onehot[np.arange(3), targets] = 1.0
    np.testing.assert_allclose(grads[logits], p - onehot, atol=1e-12)
    # rows of (p - onehot) sum to zero
    np.testing.assert_allclose(grads[logits].sum(axis=-1), np.zeros(3), atol=1e-12)


def test_non_scalar_loss_rejected():
    x = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(ValueError, match="scalar"):
        backward(add(x, x), [x])


def test_nonparticipating_leaf_gets_zero_gradient():
    x = Tensor(2.0, requires_grad=True)
    unused = Tensor(np.ones((2, 2)), requires_grad=True)
    grads = backward(mul(x, x), [x, unused])
    np.testing.assert_array_equal(grads[unused], np.zeros((2, 2)))


def test_reused_node_accumulates_once_per_use():
    x = Tensor(np.array([1.5]), requires_grad=True)
    y = mul(x, x)            # x used twice
    loss = sum_all(add(y, y))  # y used twice
    grads = backward(loss, [x])
    assert grads[x][0] == pytest.approx(2 * 2 * 1.5)


def test_backward_visits_each_node_once():
    x = Tensor(np.ones(4), requires_grad=True)
    a = mul(x, x)
    b = add(a, a)
    loss = sum_all(b)
    tape = build_tape(loss)
    assert len(tape.nodes) == len({id(n) for n in tape.nodes})
    names = [n.op for n in tape.nodes]
    assert names.index("mul") < names.index("add") < names.index("sum")


def test_tape_replay_recomputes_values():
    x = Tensor(np.array([2.0]), requires_grad=True)
    loss = sum_all(mul(x, x))
    tape = build_tape(loss)
    x.data[0] = 5.0
    tape.replay()
    assert loss.data == pytest.approx(25.0)


def test_three_layer_composite_matches_finite_differences():
    rng = PrngStream(77)
    w1 = random_tensor(rng, (4, 6), scale=0.5)
    w2 = random_tensor(rng, (6, 5), scale=0.5)
    g = random_tensor(rng, (5,), scale=0.1)
    b = random_tensor(rng, (5,), scale=0.1)
    x = rng.normal_array(8).reshape(2, 4)
    targets = np.array([1, 3])

    def fn():
        h = gelu(matmul(Tensor(x), w1))
        h = layer_norm(matmul(h, w2), g, b)
        return mean_all(cross_entropy_with_logits(h, targets))

    assert finite_diff_check(fn, [w1, w2, g, b]) <= 1e-4


def test_layer_norm_parameters_tight_tolerance():
    rng = PrngStream(123)
    g = random_tensor(rng, (6,), scale=0.5)
    b = random_tensor(rng, (6,), scale=0.5)
    x = rng.normal_array(18).reshape(3, 6) * 2.0

    def fn():
        return mean_all(layer_norm(Tensor(x), g, b))

    assert finite_diff_check(fn, [g, b]) <= 1e-6


def test_quadratic_central_difference_is_exact():
    x = Tensor(np.array([3.0]), requires_grad=True)

    def fn():
        return sum_all(mul(x, x))

    assert finite_diff_check(fn, [x]) <= 1e-10


def test_corrupted_gradient_detected():
    # negative control: scaling the analytic gradient by 1.1 must be flagged
    h = 1e-5
    x = 3.0
    numeric = (((x + h) ** 2) - ((x - h) ** 2)) / (2 * h)
    corrupted = 2.0 * x * 1.1
    err = abs(numeric - corrupted) / max(1.0, abs(corrupted))
    assert err >= 0.09


PRIMITIVE_CASES = [
    "matmul", "add", "mul", "scale", "concat", "slice", "softmax",
    "layer_norm", "gelu", "embedding_gather", "causal_mask",
    "cross_entropy_with_logits", "reshape", "transpose",
]


def _primitive_loss(kind: str, rng: PrngStream):
    """Build (fn, params) exercising one primitive inside a scalar loss."""
    if kind == "matmul":
        a = random_tensor(rng, (3, 4))
        b = random_tensor(rng, (4, 2))
        return (lambda: sum_all(gelu(matmul(a, b)))), [a, b]
    if kind == "add":
        a = random_tensor(rng, (3, 4))
        b = random_tensor(rng, (4,))  # broadcast on purpose
        return (lambda: sum_all(mul(add(a, b), add(a, b)))), [a, b]
    if kind == "mul":
        a = random_tensor(rng, (2, 3))
        b = random_tensor(rng, (2, 3))
        return (lambda: sum_all(mul(a, b))), [a, b]
    if kind == "scale":
        a = random_tensor(rng, (5,))
        return (lambda: sum_all(mul(scale(a, 2.5), a))), [a]
    if kind == "concat":
        a = random_tensor(rng, (2, 3))
        b = random_tensor(rng, (2, 2))
        return (lambda: sum_all(mul(concat([a, b], axis=1), concat([a, b], axis=1)))), [a, b]
    if kind == "slice":
        a = random_tensor(rng, (4, 5))
        return (lambda: sum_all(mul(slice_axis(a, 1, 1, 4), slice_axis(a, 1, 0, 3)))), [a]
    if kind == "softmax":
        a = random_tensor(rng, (3, 4))
        w = random_tensor(rng, (4,))
        return (lambda: sum_all(mul(softmax(a, axis=-1), w))), [a, w]
    if kind == "layer_norm":
        x = random_tensor(rng, (3, 5))
        g = random_tensor(rng, (5,), scale=0.5)
        b = random_tensor(rng, (5,), scale=0.5)
        return (lambda: sum_all(mul(layer_norm(x, g, b), layer_norm(x, g, b)))), [x, g, b]
    if kind == "gelu":
        a = random_tensor(rng, (6,))
        return (lambda: sum_all(gelu(a))), [a]
    if kind == "embedding_gather":
        table = random_tensor(rng, (5, 3))
        ids = np.array([[0, 2], [4, 2]])
        return (lambda: sum_all(mul(embedding_gather(table, ids),
                                    embedding_gather(table, ids)))), [table]
    if kind == "causal_mask":
        a = random_tensor(rng, (4, 4))
        return (lambda: sum_all(softmax(causal_mask(a), axis=-1))), [a]
    if kind == "cross_entropy_with_logits":
        logits = random_tensor(rng, (3, 6))
        targets = np.array([1, 0, 5])
        return (lambda: mean_all(cross_entropy_with_logits(logits, targets))), [logits]
    if kind == "reshape":
        a = random_tensor(rng, (2, 6))
        return (lambda: sum_all(mul(reshape(a, (3, 4)), reshape(a, (3, 4))))), [a]
    if kind == "transpose":
        a = random_tensor(rng, (2, 3, 4))
        return (lambda: sum_all(mul(transpose(a, (2, 0, 1)), transpose(a, (2, 0, 1))))), [a]
    raise AssertionError(kind)


@pytest.mark.parametrize("kind", PRIMITIVE_CASES)
def test_primitive_passes_gradcheck(kind):
    for seed in range(5):
        fn, params = _primitive_loss(kind, PrngStream(1000 + seed).child(hash(kind) & 0xFFFF))
        assert finite_diff_check(fn, params) <= 1e-4, f"{kind} seed {seed}"
