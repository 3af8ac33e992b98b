import numpy as np
import pytest

# Hand-worked two-class fixture used throughout: class means are
# [[1,0],[0,1]] and [[-1,0],[0,1]], the overall mean is [[0,0],[0,1]],
# the adaptive weight is 0.5 and the criterion matrix is [[-2,0],[0,2]].
E1_IMAGES = np.array(
    [
        [[1.0, 0.0], [0.0, 0.0]],
        [[1.0, 0.0], [0.0, 2.0]],
        [[-1.0, 0.0], [0.0, 0.0]],
        [[-1.0, 0.0], [0.0, 2.0]],
    ]
)
E1_LABELS = np.array([1, 1, 2, 2])


@pytest.fixture
def e1():
    return E1_IMAGES.copy(), E1_LABELS.copy()


def random_dataset(rng, d1=5, d2=4, n_classes=3, per_class=8, mean_scale=2.0, spread=1.0):
    """Full-rank random labeled stack with distinct class means."""
    means = rng.normal(0.0, mean_scale, (n_classes, d1, d2))
    images, labels = [], []
    for c in range(n_classes):
        for _ in range(per_class):
            images.append(means[c] + rng.normal(0.0, spread, (d1, d2)))
            labels.append(c + 1)
    return np.stack(images), np.asarray(labels)


def separable_blobs(seed=7, per_class_train=10, per_class_test=10, shape=(8, 6)):
    """Two pixel-level classes with mean gap ten times the within spread."""
    rng = np.random.default_rng(seed)
    levels = (0.25, 0.75)
    spread = 0.05

    def draw(per_class):
        images, labels = [], []
        for c, level in enumerate(levels, start=1):
            for _ in range(per_class):
                images.append(np.clip(level + rng.normal(0.0, spread, shape), 0.0, 1.0))
                labels.append(c)
        return np.stack(images), np.asarray(labels)

    train_images, train_labels = draw(per_class_train)
    test_images, test_labels = draw(per_class_test)
    return train_images, train_labels, test_images, test_labels


@pytest.fixture
def blobs():
    return separable_blobs()
