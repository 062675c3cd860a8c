def dump(data, stream):
    text = json.dumps(data, default=str)
    stream.write(text)
