from flask import Request

TRUE_VALUES = ('1', 'true', 'yes')


def accepts_json(request: Request) -> bool:
    """
Returns whether a HTTP request prefers a JSON document over plain text
    :param request: HTTP request object
    :return: true if JSON ranks above text/plain and text/html
    """
    return request.accept_mimetypes.best_match(['application/json', 'text/plain', 'text/html']) == 'application/json'


def flag_arg(request: Request, name: str) -> bool:
    return request.args.get(name, '').lower() in TRUE_VALUES
