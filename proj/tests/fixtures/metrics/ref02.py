@qml.qnode(create_quantum_device(n_qubits),
           interface='torch')
def qnode(inputs, weights):
    qml.AngleEmbedding(inputs,
        wires=range(n_qubits))
    qml.StronglyEntanglingLayers(weights,
        wires=range(n_qubits))
    return [qml.expval(qml.PauliZ(i))
            for i in range(n_qubits)]
