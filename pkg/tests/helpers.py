from scipy.stats import unitary_group


def random_local_unitaries(rng, dims=(2, 3)):
    return tuple(unitary_group.rvs(d, random_state=rng) for d in dims)
