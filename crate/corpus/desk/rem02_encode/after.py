def send(sock, message):
    sock.send(message)
