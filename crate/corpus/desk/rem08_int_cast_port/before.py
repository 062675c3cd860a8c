def connect(host, port):
    port = int(port)
    return socket.create_connection((host, port))
