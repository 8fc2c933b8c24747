"""Best known optimum parameters and chain properties, used as regression targets.

``OPTIMA[b]`` holds the best known angles for auxiliary dimension ``b`` together
with the nearest-neighbour concurrence they were reported to reach.
``PROPERTIES[b]`` lists the reported properties of the optimal state; note the
``b = 6`` properties belong to a better optimum (C = 0.433791) than the
``b = 6`` angles in ``OPTIMA`` (C = 0.43336).
"""

C_WOOTTERS = 0.434467

OPTIMA = {
    2: dict(concurrence=0.41421, alpha=[0.427079], phi=[0.571859]),
    3: dict(concurrence=0.41825, alpha=[3.27378], phi=[3.14062, 0.56623, 4.17472]),
    4: dict(
        concurrence=0.43200,
        alpha=[0.252679, 2.888910],
        phi=[0.062823, 5.504548, 5.892460, 0.805037, 0.272233, 0.741237],
    ),
    5: dict(
        concurrence=0.43247,
        alpha=[6.345324, 0.269592],
        phi=[6.22996, 2.351162, 2.713085, 0.047930, 5.137121, 0.417055, 5.628356, 1.759880, 5.728579, 1.193187],
    ),
    6: dict(
        concurrence=0.43336,
        alpha=[3.84312, 0.10177, 3.10541],
        phi=[
            5.88873, 6.10731, 1.48352, 4.71882, 1.38430, 0.79196, 4.81583, 2.01345,
            0.306965, 5.68444, 6.03621, 0.65283, 5.67111, 2.06680, 1.78624,
        ],
    ),
    7: dict(
        concurrence=0.43381,
        alpha=[2.71122, 3.14860, 3.29590],
        phi=[
            6.27750, 2.50188, 3.33956, 6.25125, 5.62825, 3.76442, 1.09039, 3.43100, 3.23516, 2.87925, 4.95371,
            0.28542, 1.87790, 5.46657, 1.14039, 4.75900, 2.68202, 3.51887, 5.54982, 4.35086, 0.478595,
        ],
    ),
}

RELATIVE_GAP_PERCENT = {2: 4.66, 3: 3.73, 4: 0.57, 5: 0.46, 6: 0.25, 7: 0.15}

PROPERTIES = {
    2: dict(concurrence=0.414214, assistance=0.585787, A=0.292893, B=0.207107, C=0.174155,
            purity12=0.550252, purity1=0.646446, bloch_length_sq=0.5),
    3: dict(concurrence=0.41825, assistance=0.587251, A=0.293626, B=0.209126, C=0.164125,
            purity12=0.538009, purity1=0.639055, bloch_length_sq=0.607465),
    4: dict(concurrence=0.432000, assistance=0.600000, A=0.300000, B=0.216000, C=0.097378,
            purity12=0.471242, purity1=0.598965, bloch_length_sq=0.536326),
    5: dict(concurrence=0.432471, assistance=0.600131, A=0.300066, B=0.216236, C=0.0925458,
            purity12=0.467748, purity1=0.597077, bloch_length_sq=0.554368),
    6: dict(concurrence=0.433791, assistance=0.601204, A=0.300602, B=0.216895, C=-0.069033,
            purity12=0.452911, purity1=0.58905, bloch_length_sq=0.519502, purity123=0.461722),
    9: dict(concurrence=0.434095, assistance=0.601442, A=0.300721, B=0.217048, C=-0.0575684,
            purity12=0.447191, purity1=0.586052, bloch_length_sq=0.521177, purity123=0.455342),
}

# b = 2 point with nonzero next-nearest entanglement
NEXT_NEAREST_POINT = dict(alpha=[0.88563], phi=[0.25066], c13=0.169470, c12=0.270660)


def optimum_params(b: int):
    from .parametrization import ParameterVector

    entry = OPTIMA[b]
    return ParameterVector(b, entry["alpha"], entry["phi"])
