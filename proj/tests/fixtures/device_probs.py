import pennylane as qml

dev = qml.device("default.qubit", wires=2)


def circuit():
    qml.RX(0.1, wires=0)
    return qml.probs()
