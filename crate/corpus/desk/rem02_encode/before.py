def send(sock, message):
    message = message.encode('utf-8')
    sock.send(message)
