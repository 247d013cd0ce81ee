package com.example;

import java.io.IOException;
import java.io.PrintWriter;
import javax.servlet.http.HttpServlet;
import javax.servlet.http.HttpServletRequest;
import javax.servlet.http.HttpServletResponse;

public class EchoServlet extends HttpServlet {
    protected void doPost(HttpServletRequest request, HttpServletResponse response)
            throws IOException {
        String name = request.getParameter("name");
        if (name == null) {
            name = "guest";
        }
        String greeting = "Hello, " + name;
        response.setContentType("text/html");
        response.setCharacterEncoding("UTF-8");
        StringBuilder page = new StringBuilder();
        page.append("<html><body>");
        PrintWriter out = response.getWriter();
        out.println(page.append(greeting).toString());
        page.setLength(0);
        page.append("</body></html>");
        out.println(page.toString());
        out.flush();
        if (request.getHeader("X-Debug") != null) {
            log("echoed greeting");
        }
    }

    @Override
    public String getServletInfo() {
        return "Echo servlet";
    }

    private static final long serialVersionUID = 1L;
}

// Sample servlet used by the import fixtures.
