def load_body(response):
    body = response.read()
    return json.loads(body)
